//! Serializable summaries of every pipeline stage and the combined report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{local_bound, pnc_bound, pnc_bound_symmetric};
use crate::certify::{canonical_povm, randomness_report, reconstruct_gamma, shifted_bell_value, PovmBehavior};
use crate::error::{Error, Result};
use crate::game::{BellExpression, QuantumSetup};
use crate::numfmt::{sci17, to_json};
use crate::observables::{observable_sum, FamilyRegistry, ObservableFamily};
use crate::qmat::{operator_norm, StateVector, C64};
use crate::quantum_opt::{delta_check, sos_certificate, OptimizerRegistry, SeesawConfig};
use crate::selftest::{analytic_junk, build_selftest_operators, fidelity, run_isometry, standard_targets, verify_relations, SwapCircuit};

/// Tolerance for comparing an optimized value with its analytic target.
pub const VALUE_TOL: f64 = 1e-6;
/// Tolerance for exact identities evaluated in floating point.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

fn check(name: &str, passed: bool) -> Check {
    Check {
        name: name.into(),
        passed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub a: Vec<i8>,
    pub b: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub n: usize,
    pub local_bound: i64,
    pub local_witness: Strategy,
    pub pnc_bound: i64,
    pub pnc_witness: Strategy,
    pub pnc_bound_symmetric: i64,
    pub quantum_bound: f64,
    pub local_success: f64,
    pub pnc_success: f64,
    pub pnc_success_exact: String,
    pub quantum_success: f64,
}

impl BoundsSummary {
    pub fn compute(n: usize) -> Result<Self> {
        let expr = BellExpression::new(n)?;
        let (local, lw) = local_bound(n)?;
        let (pnc, pw) = pnc_bound(n)?;
        let (sym, _) = pnc_bound_symmetric(n)?;
        let quantum = 2.0 * n as f64;
        Ok(Self {
            n,
            local_bound: local,
            local_witness: Strategy { a: lw.a, b: lw.b },
            pnc_bound: pnc,
            pnc_witness: Strategy { a: pw.a, b: pw.b },
            pnc_bound_symmetric: sym,
            quantum_bound: quantum,
            local_success: expr.success_from_value(local as f64),
            pnc_success: expr.success_from_value(pnc as f64),
            pnc_success_exact: expr.success_exact(pnc).to_string(),
            quantum_success: expr.success_from_value(quantum),
        })
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![
            check("pnc bound below quantum bound", (self.pnc_bound as f64) < self.quantum_bound),
            check("local bound dominates pnc bound", self.local_bound >= self.pnc_bound),
            check("constraining Bob does not raise the pnc bound", self.pnc_bound_symmetric <= self.pnc_bound),
        ]
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "local bound: {} (a = {:?}, b = {:?})", self.local_bound, self.local_witness.a, self.local_witness.b);
        let _ = writeln!(s, "pnc bound: {} (a = {:?}, b = {:?})", self.pnc_bound, self.pnc_witness.a, self.pnc_witness.b);
        let _ = writeln!(s, "pnc bound, Bob constrained too: {}", self.pnc_bound_symmetric);
        let _ = writeln!(s, "quantum bound (parity obeyed): {}", self.quantum_bound);
        let _ = writeln!(
            s,
            "success probabilities: local {:.6}, pnc {:.6} ({}), quantum {:.6}",
            self.local_success, self.pnc_success, self.pnc_success_exact, self.quantum_success
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosSummary {
    pub omegas: Vec<f64>,
    pub omega_sum: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub gap: f64,
    pub delta_expectation: f64,
    pub delta_identity_residual: f64,
    pub concavity_bound: f64,
}

impl SosSummary {
    pub fn compute(setup: &QuantumSetup) -> Self {
        let cert = sos_certificate(setup);
        let delta = delta_check(setup);
        Self {
            omega_sum: cert.omega_sum(),
            max_residual: cert.max_residual(),
            omegas: cert.omegas,
            residuals: cert.residuals,
            gap: cert.gap,
            delta_expectation: cert.delta_expectation,
            delta_identity_residual: delta.identity_residual(),
            concavity_bound: crate::quantum_opt::concavity_bound(setup.n()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSummary {
    pub n: usize,
    pub optimizer: String,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
    pub value: f64,
    pub target: f64,
    pub converged: bool,
    pub iterations: usize,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    pub alice_sum_norm: f64,
    pub alice_bloch: Vec<[f64; 3]>,
    pub bob_bloch: Vec<[f64; 3]>,
    pub sos: SosSummary,
}

impl OptimizeSummary {
    pub fn compute(n: usize, optimizer: &str, config: &SeesawConfig) -> Result<Self> {
        let out = OptimizerRegistry::builtin().get(optimizer)?.optimize(n, config)?;
        let setup = out.setup();
        Ok(Self {
            n,
            optimizer: optimizer.into(),
            seed: config.seed,
            restarts: config.restarts,
            tol: config.tol,
            value: out.value(),
            target: 2.0 * n as f64,
            converged: out.converged(),
            iterations: out.best.iterations,
            best_restart: out.best_restart,
            restart_values: out.restart_values.clone(),
            alice_sum_norm: operator_norm(&observable_sum(&setup.alice)),
            alice_bloch: setup.alice.iter().map(|o| o.bloch()).collect(),
            bob_bloch: setup.bob.iter().map(|o| o.bloch()).collect(),
            sos: SosSummary::compute(setup),
        })
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![
            check("optimizer converged", self.converged),
            check("value reaches 2n", self.value >= self.target - VALUE_TOL),
            check("sos gap nonnegative", self.sos.gap >= -IDENTITY_TOL),
            check("sos gap closes at the optimum", self.sos.gap <= VALUE_TOL),
            check("omega identity holds", self.sos.delta_identity_residual <= IDENTITY_TOL),
        ]
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}, optimizer {}, seed {}, {} restarts, tol {:e}", self.n, self.optimizer, self.seed, self.restarts, self.tol);
        let _ = writeln!(s, "value: {} (target {}), converged: {}, iterations: {}", sci17(self.value), self.target, self.converged, self.iterations);
        let _ = writeln!(s, "best restart: {}", self.best_restart);
        let _ = writeln!(s, "|sum of Alice observables|: {:.3e}", self.alice_sum_norm);
        let _ = writeln!(s, "sos: sum omega = {}, gap = {:.3e}, max residual = {:.3e}", sci17(self.sos.omega_sum), self.sos.gap, self.sos.max_residual);
        let _ = writeln!(s, "<Delta> = {}", sci17(self.sos.delta_expectation));
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub target: String,
    pub fidelity: f64,
    pub overlap_re: f64,
    pub overlap_im: f64,
    pub entry_error: f64,
    pub analytic_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSummary {
    pub label: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestSummary {
    pub n: usize,
    pub family: String,
    pub perturbation: f64,
    pub divisors: Vec<f64>,
    pub circuit_unitarity_deviation: f64,
    pub relations: Vec<RelationSummary>,
    pub max_residual: f64,
    pub junk_fidelity: f64,
    pub state_fidelity: f64,
    pub extractions: Vec<Extraction>,
    pub min_fidelity: f64,
}

/// `((1 − δ)|φ⁺⟩ + δ|00⟩)` normalized.
pub fn perturbed_state(delta: f64) -> Result<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    StateVector::normalized(vec![C64::new((1.0 - delta) * h + delta, 0.0), z, z, C64::new((1.0 - delta) * h, 0.0)])
}

impl SelftestSummary {
    pub fn compute(fam: &ObservableFamily, perturbation: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&perturbation) {
            return Err(Error::InvalidParams(format!("perturbation {perturbation} outside [0, 1]")));
        }
        let setup = QuantumSetup::canonical(fam).with_state(perturbed_state(perturbation)?)?;
        let ops = build_selftest_operators(&setup)?;
        let circuit = SwapCircuit::new(&ops)?;
        let relations: Vec<RelationSummary> = verify_relations(&ops, &setup)
            .into_iter()
            .map(|r| RelationSummary {
                label: r.label,
                residual: r.residual,
            })
            .collect();
        let mut extractions = Vec::new();
        let mut junk_fidelity = 0.0;
        for t in standard_targets(fam.n) {
            let r = run_isometry(&setup, &ops, t)?;
            if t == crate::selftest::Target::State {
                junk_fidelity = fidelity(&r.junk, &analytic_junk(&setup, &ops));
            }
            extractions.push(Extraction {
                target: r.target,
                fidelity: r.fidelity,
                overlap_re: r.overlap.re,
                overlap_im: r.overlap.im,
                entry_error: r.entry_error,
                analytic_fidelity: r.analytic_fidelity,
            });
        }
        Ok(Self {
            n: fam.n,
            family: fam.construction.clone(),
            perturbation,
            divisors: ops.divisors.clone(),
            circuit_unitarity_deviation: circuit.unitary().unitarity_deviation(),
            max_residual: relations.iter().map(|r| r.residual).fold(0.0, f64::max),
            relations,
            junk_fidelity,
            state_fidelity: extractions[0].fidelity,
            min_fidelity: extractions.iter().map(|e| e.fidelity).fold(1.0, f64::min),
            extractions,
        })
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![
            check("isometry circuit unitary", self.circuit_unitarity_deviation <= IDENTITY_TOL),
            check("self-testing relations hold", self.max_residual <= IDENTITY_TOL),
            check("state extracted", self.state_fidelity >= 1.0 - IDENTITY_TOL),
            check("measurements extracted", self.min_fidelity >= 1.0 - IDENTITY_TOL),
        ]
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}, family {}, perturbation {}", self.n, self.family, self.perturbation);
        for r in &self.relations {
            let _ = writeln!(s, "  {:<40} {:.3e}", r.label, r.residual);
        }
        let _ = writeln!(s, "max residual: {:.3e}", self.max_residual);
        for e in &self.extractions {
            let _ = writeln!(s, "  extract {:<6} fidelity {}", e.target, sci17(e.fidelity));
        }
        let _ = writeln!(s, "state fidelity: {}", sci17(self.state_fidelity));
        let _ = writeln!(s, "junk fidelity: {}", sci17(self.junk_fidelity));
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifySummary {
    pub n: usize,
    pub family: String,
    pub alpha: f64,
    pub povm_spectrum: Vec<Vec<f64>>,
    pub extremal: bool,
    pub outcome_probabilities: Vec<f64>,
    pub bell_value: f64,
    pub penalty: f64,
    pub shifted_bell_value: f64,
    pub gamma: Option<Vec<[f64; 4]>>,
    pub gamma_deviation: Option<f64>,
    pub guessing_probability: f64,
    pub min_entropy_bits: f64,
    pub certified: bool,
}

impl CertifySummary {
    pub fn compute(fam: &ObservableFamily, alpha: f64, tol: f64) -> Result<Self> {
        let setup = QuantumSetup::canonical(fam);
        let povm = canonical_povm(fam)?;
        let shifted = shifted_bell_value(&setup, &povm, alpha)?;
        let rnd = randomness_report(&setup, &povm, tol)?;
        let gamma = if fam.n == 3 {
            Some(reconstruct_gamma(&PovmBehavior::from_setup(&setup, &povm)?)?)
        } else {
            None
        };
        Ok(Self {
            n: fam.n,
            family: fam.construction.clone(),
            alpha,
            povm_spectrum: povm.spectrum(),
            extremal: rnd.extremal,
            outcome_probabilities: rnd.outcome_probabilities,
            bell_value: shifted.bell_value,
            penalty: shifted.penalty,
            shifted_bell_value: shifted.value,
            gamma_deviation: gamma.as_ref().map(|g| g.deviation),
            gamma: gamma.map(|g| g.gammas),
            guessing_probability: rnd.guessing_probability,
            min_entropy_bits: rnd.min_entropy_bits,
            certified: rnd.certified,
        })
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut v = vec![
            check("shifted bell value at 2n", (self.shifted_bell_value - 2.0 * self.n as f64).abs() <= VALUE_TOL),
            check("povm extremal", self.extremal),
            check("randomness certified", self.certified),
        ];
        if let Some(d) = self.gamma_deviation {
            v.push(check("povm reconstructed from correlations", d <= 10.0 * IDENTITY_TOL));
        }
        v
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}, family {}, alpha {}", self.n, self.family, self.alpha);
        for (k, sp) in self.povm_spectrum.iter().enumerate() {
            let _ = writeln!(s, "  E{} eigenvalues {:?}, P = {}", k + 1, sp, sci17(self.outcome_probabilities[k]));
        }
        let _ = writeln!(s, "extremal: {}", self.extremal);
        let _ = writeln!(s, "bell value {}, penalty {:.3e}, shifted value {}", sci17(self.bell_value), self.penalty, sci17(self.shifted_bell_value));
        if let Some(g) = &self.gamma {
            for (k, gk) in g.iter().enumerate() {
                let _ = writeln!(s, "  gamma_{} = {:?}", k + 1, gk);
            }
        }
        if self.certified {
            let _ = writeln!(s, "guessing probability: {} (certified)", sci17(self.guessing_probability));
            let _ = writeln!(s, "min-entropy: {} bits", sci17(self.min_entropy_bits));
        } else {
            let _ = writeln!(s, "randomness not certified; observed max P(k) = {}", sci17(self.guessing_probability));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub restarts: usize,
    pub tolerance: f64,
    pub optimizer: String,
    pub version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessProbabilities {
    pub local: f64,
    pub pnc: f64,
    pub quantum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub n: usize,
    pub family: String,
    pub local_bound: i64,
    pub pnc_bound: i64,
    pub quantum_value: f64,
    pub success_probabilities: SuccessProbabilities,
    pub min_entropy_bits: f64,
    pub bounds: BoundsSummary,
    pub optimization: OptimizeSummary,
    pub selftest: Option<SelftestSummary>,
    pub certification: CertifySummary,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub n: usize,
    pub family: Option<String>,
    pub params: Vec<f64>,
    pub optimizer: String,
    pub seesaw: SeesawConfig,
    pub alpha: f64,
}

impl PipelineOptions {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            family: None,
            params: Vec::new(),
            optimizer: "seesaw".into(),
            seesaw: SeesawConfig::default(),
            alpha: 1.0,
        }
    }
}

/// Builds the family named in `family`, or the default one for `n`.
pub fn resolve_family(n: usize, family: Option<&str>, params: &[f64]) -> Result<ObservableFamily> {
    let name = family.unwrap_or(FamilyRegistry::default_name(n));
    FamilyRegistry::builtin().build(name, n, params)
}

pub fn run_pipeline(opts: &PipelineOptions) -> Result<CertificationReport> {
    let n = opts.n;
    let fam = resolve_family(n, opts.family.as_deref(), &opts.params)?;
    let bounds = BoundsSummary::compute(n)?;
    let optimization = OptimizeSummary::compute(n, &opts.optimizer, &opts.seesaw)?;
    let selftest = if n == 3 || n == 5 {
        Some(SelftestSummary::compute(&fam, 0.0)?)
    } else {
        None
    };
    let certification = CertifySummary::compute(&fam, opts.alpha, opts.seesaw.tol)?;
    let expr = BellExpression::new(n)?;
    let mut checks = bounds.checks();
    checks.extend(optimization.checks());
    checks.push(check(
        "quantum value violates the pnc bound",
        optimization.value > bounds.pnc_bound as f64 + VALUE_TOL,
    ));
    if let Some(st) = &selftest {
        checks.extend(st.checks());
    }
    checks.extend(certification.checks());
    Ok(CertificationReport {
        n,
        family: fam.construction.clone(),
        local_bound: bounds.local_bound,
        pnc_bound: bounds.pnc_bound,
        quantum_value: optimization.value,
        success_probabilities: SuccessProbabilities {
            local: bounds.local_success,
            pnc: bounds.pnc_success,
            quantum: expr.success_from_value(optimization.value),
        },
        min_entropy_bits: certification.min_entropy_bits,
        bounds,
        optimization,
        selftest,
        certification,
        checks,
        provenance: Provenance {
            seed: opts.seesaw.seed,
            restarts: opts.seesaw.restarts,
            tolerance: opts.seesaw.tol,
            optimizer: opts.optimizer.clone(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        },
    })
}

impl CertificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "== bounds ==\n{}", self.bounds.text());
        let _ = writeln!(s, "== optimization ==\n{}", self.optimization.text());
        if let Some(st) = &self.selftest {
            let _ = writeln!(s, "== self-test ==\n{}", st.text());
        }
        let _ = writeln!(s, "== certification ==\n{}", self.certification.text());
        let _ = writeln!(s, "== checks ==");
        for c in &self.checks {
            let _ = writeln!(s, "  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.name);
        }
        let p = &self.provenance;
        let _ = writeln!(s, "seed {}, restarts {}, tol {:e}, optimizer {}, version {}, at {}", p.seed, p.restarts, p.tolerance, p.optimizer, p.version, p.timestamp);
        s
    }
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Flattens any serializable value into `key,value` rows, nested keys
/// joined with `.` and array positions as indices.
pub fn to_flat_csv<T: Serialize>(value: &T) -> Result<String> {
    fn walk(prefix: &str, v: &serde_json::Value, rows: &mut Vec<(String, String)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    walk(&join(k), v, rows);
                }
            }
            serde_json::Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&join(&i.to_string()), v, rows);
                }
            }
            serde_json::Value::Number(num) => {
                let text = if num.is_f64() {
                    sci17(num.as_f64().unwrap_or(f64::NAN))
                } else {
                    num.to_string()
                };
                rows.push((prefix.to_string(), text));
            }
            serde_json::Value::String(s) => rows.push((prefix.to_string(), s.clone())),
            serde_json::Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
            serde_json::Value::Null => rows.push((prefix.to_string(), String::new())),
        }
    }
    let tree = serde_json::to_value(value)?;
    let mut rows = Vec::new();
    walk("", &tree, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Renders `value` in `format`, using `text` for the human-readable form.
pub fn render<T: Serialize>(value: &T, format: Format, text: impl FnOnce(&T) -> String) -> Result<String> {
    match format {
        Format::Json => to_json(value, true).map(|mut s| {
            s.push('\n');
            s
        }),
        Format::Csv => to_flat_csv(value),
        Format::Text => Ok(text(value)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_for_three_inputs() {
        let report = run_pipeline(&PipelineOptions::new(3)).unwrap();
        assert_eq!((report.local_bound, report.pnc_bound), (5, 4));
        assert!((report.quantum_value - 6.0).abs() < VALUE_TOL);
        assert!((report.min_entropy_bits - 3f64.log2()).abs() < 1e-12);
        assert_eq!(report.bounds.pnc_success_exact, "13/18");
        assert!(report.all_passed(), "{:?}", report.checks);
    }

    #[test]
    fn report_json_round_trip() {
        let report = run_pipeline(&PipelineOptions::new(3)).unwrap();
        let json = to_json(&report, true).unwrap();
        let back: CertificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(to_json(&back, true).unwrap(), json);
    }

    #[test]
    fn five_inputs_are_not_certified() {
        let report = run_pipeline(&PipelineOptions::new(5)).unwrap();
        assert!(!report.certification.certified);
        assert!(!report.all_passed());
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["povm extremal", "randomness certified"]);
    }

    #[test]
    fn flat_csv_layout() {
        let b = BoundsSummary::compute(3).unwrap();
        let csv = to_flat_csv(&b).unwrap();
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("\nlocal_bound,5\n"));
        assert!(csv.contains("\nlocal_witness.a.0,"));
        assert!(csv.contains("\nquantum_bound,6.0000000000000000e0\n"));
    }

    #[test]
    fn perturbed_selftest_fails_checks() {
        let fam = resolve_family(3, None, &[]).unwrap();
        let st = SelftestSummary::compute(&fam, 0.05).unwrap();
        assert!(st.checks().iter().any(|c| !c.passed));
        assert!(st.state_fidelity < 1.0);
    }
}
