//! Text and JSON forms of biplanes, divisor classes and curve functionals.
//!
//! * Biplane: eleven lines of five ascending integers in `1..=11`.
//! * Divisor (text): one `<coeff> <subset>` term per line, subsets written as
//!   `1,3,4,5,9`. Sides are canonicalized and repeated keys summed. Blank
//!   lines and `#` comments are skipped.
//! * Divisor (JSON): `{"n": 12, "terms": [{"coeff": -5, "subset": "..."}]}`.
//! * Curve functional (JSON):
//!   `{"n": 12, "psi": [v_1, ..., v_n], "boundary": [{"subset": "...", "value": 1}]}`.

use serde::{Deserialize, Serialize};

use crate::biplane::{verify_biplane, Biplane};
use crate::curves::CurveFunctional;
use crate::error::{Error, Result};
use crate::picard::DivisorClass;
use crate::setcore::{canonical_generator, SubsetMask};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses the biplane text format; checks the axioms unless `verify` is
/// false. Shape problems are reported as malformed designs.
pub fn parse_biplane(text: &str, verify: bool) -> Result<Biplane> {
    let mut blocks = Vec::new();
    for (line, l) in content_lines(text) {
        let pts: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::MalformedDesign(format!("line {line}: expected integers, got {l:?}")))?;
        if pts.len() != 5 || pts.windows(2).any(|w| w[0] >= w[1]) || pts.iter().any(|&p| !(1..=11).contains(&p)) {
            return Err(Error::MalformedDesign(format!(
                "line {line}: expected five ascending points in 1..=11, got {l:?}"
            )));
        }
        blocks.push(SubsetMask::from_markings(pts)?);
    }
    let b = Biplane::new(blocks)?;
    if verify {
        verify_biplane(&b)?;
    }
    Ok(b)
}

pub fn format_biplane(b: &Biplane) -> String {
    let mut out = String::new();
    for blk in b.blocks() {
        let pts: Vec<String> = blk.iter().map(|p| p.to_string()).collect();
        out.push_str(&pts.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_divisor_text(text: &str, n: usize) -> Result<DivisorClass> {
    let mut d = DivisorClass::zero(n)?;
    for (line, l) in content_lines(text) {
        let parse_err = |msg: String| Error::Parse { line, msg };
        let mut it = l.split_whitespace();
        let (Some(c), Some(s), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(format!("expected `<coeff> <subset>`, got {l:?}")));
        };
        let c: i64 = c.parse().map_err(|_| parse_err(format!("bad coefficient {c:?}")))?;
        let s: SubsetMask = s.parse().map_err(|e: Error| parse_err(e.to_string()))?;
        let key = canonical_generator(s, n).map_err(|e| parse_err(e.to_string()))?;
        d.add_term(key, c);
    }
    Ok(d)
}

pub fn format_divisor_text(d: &DivisorClass) -> String {
    d.terms().map(|(k, c)| format!("{c} {k}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorTerm {
    pub coeff: i64,
    pub subset: SubsetMask,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorJson {
    pub n: usize,
    pub terms: Vec<DivisorTerm>,
}

impl From<&DivisorClass> for DivisorJson {
    fn from(d: &DivisorClass) -> Self {
        DivisorJson {
            n: d.n(),
            terms: d.terms().map(|(k, c)| DivisorTerm { coeff: c, subset: k.side() }).collect(),
        }
    }
}

impl TryFrom<DivisorJson> for DivisorClass {
    type Error = Error;

    fn try_from(j: DivisorJson) -> Result<Self> {
        DivisorClass::from_terms(j.n, j.terms.into_iter().map(|t| (t.subset, t.coeff)))
    }
}

pub fn parse_divisor_json(text: &str) -> Result<DivisorClass> {
    let j: DivisorJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    j.try_into()
}

pub fn format_divisor_json(d: &DivisorClass) -> String {
    serde_json::to_string_pretty(&DivisorJson::from(d)).expect("plain data serializes")
}

/// JSON when the text starts with `{`, otherwise the line format on
/// `default_n` markings.
pub fn parse_divisor(text: &str, default_n: usize) -> Result<DivisorClass> {
    if text.trim_start().starts_with('{') {
        parse_divisor_json(text)
    } else {
        parse_divisor_text(text, default_n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryValue {
    pub subset: SubsetMask,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub n: usize,
    pub psi: Vec<i64>,
    pub boundary: Vec<BoundaryValue>,
}

impl From<&CurveFunctional> for FunctionalJson {
    fn from(f: &CurveFunctional) -> Self {
        let n = f.n();
        FunctionalJson {
            n,
            psi: (1..=n).map(|i| f.psi(i).expect("marking in range")).collect(),
            boundary: f
                .boundary_values()
                .map(|(k, v)| BoundaryValue { subset: k.side(), value: v })
                .collect(),
        }
    }
}

impl TryFrom<FunctionalJson> for CurveFunctional {
    type Error = Error;

    fn try_from(j: FunctionalJson) -> Result<Self> {
        let mut f = CurveFunctional::zero(j.n)?;
        if j.psi.len() != j.n {
            return Err(Error::InvalidInput(format!(
                "expected {} psi values, found {}",
                j.n,
                j.psi.len()
            )));
        }
        for (i, v) in j.psi.iter().enumerate() {
            f.set_psi(i + 1, *v)?;
        }
        for b in j.boundary {
            let key = canonical_generator(b.subset, j.n)?;
            if key.is_psi(j.n) {
                return Err(Error::InvalidInput(format!(
                    "boundary entry {{{}}} is a psi-type generator",
                    b.subset
                )));
            }
            f.set(key, b.value);
        }
        Ok(f)
    }
}

pub fn parse_functional_json(text: &str) -> Result<CurveFunctional> {
    let j: FunctionalJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    j.try_into()
}

pub fn format_functional_json(f: &CurveFunctional) -> String {
    serde_json::to_string_pretty(&FunctionalJson::from(f)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biplane::build_biplane_qr;
    use crate::curves::build_cp;
    use crate::picard::{build_dp, canonical_k, relation_row};
    use proptest::prelude::*;

    #[test]
    fn biplane_text_round_trip() {
        let b = build_biplane_qr();
        let text = format_biplane(&b);
        assert_eq!(text.lines().count(), 11);
        assert!(text.lines().any(|l| l == "1 3 4 5 9"));
        assert_eq!(parse_biplane(&text, true).unwrap(), b);
    }

    #[test]
    fn biplane_errors() {
        let good = format_biplane(&build_biplane_qr());
        let ten: String = good.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_biplane(&ten, true), Err(Error::MalformedDesign(_))));
        let unsorted = good.replacen("1 3 4 5 9", "3 1 4 5 9", 1);
        assert!(matches!(parse_biplane(&unsorted, true), Err(Error::MalformedDesign(_))));
        let junk = good.replacen("1 3 4 5 9", "1 3 x 5 9", 1);
        assert!(matches!(parse_biplane(&junk, true), Err(Error::MalformedDesign(_))));
        let broken = good.replacen("1 3 4 5 9", "1 2 3 4 5", 1);
        assert!(matches!(parse_biplane(&broken, true), Err(Error::DesignViolation { .. })));
        assert!(parse_biplane(&broken, false).is_ok());
    }

    #[test]
    fn divisor_text_canonicalizes_and_sums() {
        let text = "# psi_12 and a boundary term\n2 12\n-1 1,2\n3 3,4,5,6,7,8,9,10,11,12\n";
        let d = parse_divisor_text(text, 12).unwrap();
        assert_eq!(d.coeff_of("1,2".parse().unwrap()).unwrap(), 2);
        assert_eq!(d.coeff_of("1,2,3,4,5,6,7,8,9,10,11".parse().unwrap()).unwrap(), 2);
        assert_eq!(d.support_len(), 2);
    }

    #[test]
    fn divisor_text_errors_carry_line_numbers() {
        let err = parse_divisor_text("1 1,2\n\nx 1,3\n", 6).unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, msg: "bad coefficient \"x\"".into() });
        assert!(matches!(parse_divisor_text("1 1,2,3,4,5,6\n", 6), Err(Error::Parse { line: 1, .. })));
        assert!(parse_divisor_text("1\n", 6).is_err());
    }

    #[test]
    fn divisor_json_round_trip() {
        let d = build_dp(&build_biplane_qr()).unwrap();
        let json = format_divisor_json(&d);
        assert!(json.contains("\"subset\": \"1,2,3,4,5,6,7,8,9,10,11\""));
        assert_eq!(parse_divisor(&json, 5).unwrap(), d);
        assert_eq!(parse_divisor(&format_divisor_text(&d), 12).unwrap(), d);
    }

    #[test]
    fn functional_json_round_trip() {
        let cp = build_cp(&build_biplane_qr()).unwrap();
        let json = format_functional_json(&cp);
        let j: FunctionalJson = serde_json::from_str(&json).unwrap();
        assert_eq!(j.psi[11], -2);
        assert_eq!(j.boundary.len(), 11);
        assert_eq!(parse_functional_json(&json).unwrap(), cp);
        let bad = r#"{"n": 6, "psi": [1, 2], "boundary": []}"#;
        assert!(parse_functional_json(bad).is_err());
        let bad = r#"{"n": 6, "psi": [0,0,0,0,0,0], "boundary": [{"subset": "6", "value": 1}]}"#;
        assert!(parse_functional_json(bad).is_err());
    }

    proptest! {
        #[test]
        fn divisor_formats_round_trip(terms in prop::collection::vec((1u16..512, -9i64..=9), 0..20)) {
            let d = DivisorClass::from_terms(
                10,
                terms.into_iter().map(|(b, c)| (SubsetMask::from_bits(b), c)),
            ).unwrap();
            prop_assert_eq!(&parse_divisor_text(&format_divisor_text(&d), 10).unwrap(), &d);
            prop_assert_eq!(&parse_divisor_json(&format_divisor_json(&d)).unwrap(), &d);
        }
    }

    #[test]
    fn relation_and_k_files() {
        let r = relation_row(1, 2, 6).unwrap();
        assert_eq!(format_divisor_text(&r).lines().count(), 16);
        let k = canonical_k(6).unwrap();
        assert_eq!(parse_divisor_json(&format_divisor_json(&k)).unwrap(), k);
    }
}
