use serde_json::{json, Value};

use tensorkit_core::solve::BasisSet;
use tensorkit_core::{DenseTensor, Error, GroupSpec, Result};

/// Half-even rounding to four decimals, with negative zero folded to zero.
pub fn fmt4(v: f64) -> String {
    let r = (v * 1e4).round_ties_even() / 1e4;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.4}")
}

fn one_based(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub fn tensor_text(t: &DenseTensor) -> String {
    t.entries(1e-8)
        .iter()
        .map(|(idx, v)| format!("  ({})  {}\n", one_based(idx), fmt4(*v)))
        .collect()
}

pub fn tensor_json(t: &DenseTensor) -> Value {
    Value::Array(
        t.entries(1e-12)
            .into_iter()
            .map(|(idx, v)| {
                let mut row: Vec<Value> = idx.iter().map(|i| json!(i + 1)).collect();
                row.push(json!(v));
                Value::Array(row)
            })
            .collect(),
    )
}

pub fn tensor_csv(k: usize, t: &DenseTensor, out: &mut String) {
    for (idx, v) in t.entries(1e-8) {
        let cols: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        out.push_str(&format!("{},{},{}\n", k + 1, cols.join(","), fmt4(v)));
    }
}

/// Largest `‖g⊠b − b‖` over the generators, per element.
pub fn invariance_residuals(group: &GroupSpec, elements: &[DenseTensor]) -> Result<Vec<f64>> {
    elements
        .iter()
        .map(|b| {
            group.generators.iter().try_fold(0.0f64, |acc, g| {
                Ok(acc.max(b.group_action(g)?.sub(b)?.norm()))
            })
        })
        .collect()
}

pub fn basis_json(basis: &BasisSet, elements: &[DenseTensor], residuals: &[f64]) -> Value {
    let p = &basis.provenance;
    json!({
        "schema": 1,
        "order": basis.order,
        "dim": basis.dim,
        "group": p.group,
        "convention": p.convention,
        "space": p.space,
        "algorithm": p.algorithm.as_str(),
        "seed": p.seed,
        "elements": elements.iter().map(tensor_json).collect::<Vec<_>>(),
        "residuals": {
            "invariance": residuals,
            "orthonormality": basis.orthonormality_error(),
            "tolerance": p.tolerance,
        },
    })
}

/// Reads the `elements` of a schema-1 basis file.
pub fn read_basis_json(text: &str) -> Result<Vec<DenseTensor>> {
    let v: Value = serde_json::from_str(text)?;
    let bad = |m: &str| Error::InvalidArgument(format!("basis file: {m}"));
    if v["schema"] != json!(1) {
        return Err(bad("expected \"schema\": 1"));
    }
    let order = v["order"].as_u64().ok_or_else(|| bad("missing order"))? as usize;
    let dim = v["dim"].as_u64().ok_or_else(|| bad("missing dim"))? as usize;
    let elems = v["elements"].as_array().ok_or_else(|| bad("missing elements"))?;
    elems
        .iter()
        .map(|e| {
            let rows = e.as_array().ok_or_else(|| bad("element is not a list"))?;
            let mut entries = Vec::with_capacity(rows.len());
            for r in rows {
                let r = r.as_array().filter(|r| r.len() == order + 1).ok_or_else(|| bad("malformed entry"))?;
                let idx = r[..order]
                    .iter()
                    .map(|i| match i.as_u64() {
                        Some(i) if i >= 1 => Ok(i as usize - 1),
                        _ => Err(bad("indices are 1-based integers")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let val = r[order].as_f64().ok_or_else(|| bad("value is not a number"))?;
                entries.push((idx, val));
            }
            DenseTensor::from_entries(order, dim, &entries)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_decimals() {
        assert_eq!(fmt4(1.0), "1.0000");
        assert_eq!(fmt4(-0.34962), "-0.3496");
        assert_eq!(fmt4(-1e-9), "0.0000");
        assert_eq!(fmt4(2.71828), "2.7183");
    }

    #[test]
    fn json_round_trip() {
        let t = DenseTensor::from_entries(2, 3, &[(vec![0, 2], 0.5), (vec![2, 0], -1.25)]).unwrap();
        let v = json!({"schema": 1, "order": 2, "dim": 3, "elements": [tensor_json(&t)]});
        let back = read_basis_json(&v.to_string()).unwrap();
        assert_eq!(back, vec![t]);
    }
}
