//! Behavior tables as CSV (`x,y,a,b,p`) and JSON (`"x,y"` → 2×2 block).
//! Inputs are 1-based on disk.

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use super::Behavior;
use crate::error::{Error, Result};
use crate::numfmt::{sci17, to_json};

pub fn behavior_to_csv(beh: &Behavior) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "a", "b", "p"])?;
    let n = beh.n();
    for x in 0..n {
        for y in 0..n {
            for a in 0..2u8 {
                for b in 0..2u8 {
                    w.write_record([
                        (x + 1).to_string(),
                        (y + 1).to_string(),
                        a.to_string(),
                        b.to_string(),
                        sci17(beh.p(x, y, a, b)),
                    ])?;
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn behavior_from_csv(text: &str) -> Result<Behavior> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(["x", "y", "a", "b", "p"]) {
        return Err(Error::Parse(format!("unexpected CSV header {:?}", header)));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
        let int = |i: usize| {
            field(i)
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer `{}`", field(i))))
        };
        let p = field(4)
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad probability `{}`", field(4))))?;
        rows.push((int(0)?, int(1)?, int(2)?, int(3)?, p));
    }
    let n = side_length(rows.len() / 4, rows.len() % 4 == 0)?;
    let mut probs = vec![f64::NAN; 4 * n * n];
    for (x, y, a, b, p) in rows {
        if !(1..=n).contains(&x) || !(1..=n).contains(&y) || a > 1 || b > 1 {
            return Err(Error::Parse(format!("entry ({x},{y},{a},{b}) out of range for n = {n}")));
        }
        let slot = &mut probs[(((x - 1) * n + (y - 1)) * 2 + a) * 2 + b];
        if !slot.is_nan() {
            return Err(Error::Parse(format!("duplicate entry ({x},{y},{a},{b})")));
        }
        *slot = p;
    }
    Behavior::new(n, probs)
}

struct JsonView<'a>(&'a Behavior);

impl Serialize for JsonView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let beh = self.0;
        let n = beh.n();
        let mut map = s.serialize_map(Some(n * n))?;
        for x in 0..n {
            for y in 0..n {
                let block = [
                    [beh.p(x, y, 0, 0), beh.p(x, y, 0, 1)],
                    [beh.p(x, y, 1, 0), beh.p(x, y, 1, 1)],
                ];
                map.serialize_entry(&format!("{},{}", x + 1, y + 1), &block)?;
            }
        }
        map.end()
    }
}

pub fn behavior_to_json(beh: &Behavior, pretty: bool) -> Result<String> {
    to_json(&JsonView(beh), pretty)
}

pub fn behavior_from_json(text: &str) -> Result<Behavior> {
    let raw: BTreeMap<String, [[f64; 2]; 2]> = serde_json::from_str(text)?;
    let n = side_length(raw.len(), true)?;
    let mut probs = vec![f64::NAN; 4 * n * n];
    for (key, block) in raw {
        let (x, y) = key
            .split_once(',')
            .and_then(|(x, y)| Some((x.trim().parse::<usize>().ok()?, y.trim().parse::<usize>().ok()?)))
            .filter(|(x, y)| (1..=n).contains(x) && (1..=n).contains(y))
            .ok_or_else(|| Error::Parse(format!("bad key `{key}`")))?;
        let base = ((x - 1) * n + (y - 1)) * 4;
        probs[base..base + 4].copy_from_slice(&[block[0][0], block[0][1], block[1][0], block[1][1]]);
    }
    if probs.iter().any(|p| p.is_nan()) {
        return Err(Error::Parse("missing input pairs".into()));
    }
    Behavior::new(n, probs)
}

fn side_length(pairs: usize, whole: bool) -> Result<usize> {
    let n = (pairs as f64).sqrt().round() as usize;
    if !whole || n == 0 || n * n != pairs {
        return Err(Error::Parse(format!("{pairs} input pairs do not form a square table")));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{behavior_from_setup, QuantumSetup};
    use crate::observables::{family_n, trine};
    use proptest::prelude::*;

    fn trine_behavior() -> Behavior {
        behavior_from_setup(&QuantumSetup::canonical(&trine())).unwrap()
    }

    #[test]
    fn csv_layout() {
        let text = behavior_to_csv(&trine_behavior()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,a,b,p"));
        assert!(lines.next().unwrap().starts_with("1,1,0,0,"));
        assert_eq!(text.lines().count(), 37);
    }

    #[test]
    fn json_keys_in_numeric_order() {
        let beh = behavior_from_setup(&QuantumSetup::canonical(&family_n(11, &[]).unwrap())).unwrap();
        let text = behavior_to_json(&beh, false).unwrap();
        let i2 = text.find("\"1,2\"").unwrap();
        let i10 = text.find("\"1,10\"").unwrap();
        assert!(i2 < i10);
    }

    #[test]
    fn round_trips_are_bit_exact() {
        let beh = trine_behavior();
        let csv = behavior_to_csv(&beh).unwrap();
        let back = behavior_from_csv(&csv).unwrap();
        assert_eq!(back, beh);
        assert_eq!(behavior_to_csv(&back).unwrap(), csv);

        let json = behavior_to_json(&beh, true).unwrap();
        let back = behavior_from_json(&json).unwrap();
        assert_eq!(back, beh);
        assert_eq!(behavior_to_json(&back, true).unwrap(), json);
    }

    #[test]
    fn malformed_inputs() {
        assert!(behavior_from_csv("x,y,a,b,q\n").is_err());
        assert!(behavior_from_csv("x,y,a,b,p\n1,1,0,0,1\n").is_err());
        assert!(behavior_from_json("{\"1,1\": [[0.5, 0.5], [0.0, 0.0]], \"1,2\": [[1,0],[0,0]]}").is_err());
        assert!(behavior_from_json("{\"1,1\": [[0.25, 0.25], [0.25, 0.25]]}").is_ok());
    }

    proptest! {
        #[test]
        fn random_behaviors_round_trip(seed in prop::collection::vec(0.0f64..1.0, 36)) {
            let probs: Vec<f64> = seed
                .chunks(4)
                .flat_map(|c| {
                    let s: f64 = c.iter().sum::<f64>() + 1e-3;
                    c.iter().map(move |v| (v + 2.5e-4) / s).collect::<Vec<_>>()
                })
                .collect();
            let beh = Behavior::new(3, probs).unwrap();
            prop_assert_eq!(behavior_from_csv(&behavior_to_csv(&beh).unwrap()).unwrap(), beh.clone());
            prop_assert_eq!(behavior_from_json(&behavior_to_json(&beh, false).unwrap()).unwrap(), beh);
        }
    }
}
