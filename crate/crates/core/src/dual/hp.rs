//! High-precision re-evaluation of a dual constraint.
//!
//! Mirrors [`super::constraint_terms`] in binary floating point with
//! [`HP_PRECISION`] bits, taking the certificate values as exact binary
//! fractions. Used to settle verdicts on cases whose double-precision
//! value is too close to zero to trust.

use dashu_float::FBig;

use super::{CaseSignature, DualCertificate, DualError, DualProgram};
use crate::signatures::e33_coefficient;

pub const HP_PRECISION: usize = 256;

type F = FBig;

fn num(x: f64) -> F {
    F::try_from(x).expect("finite input").with_precision(HP_PRECISION).value()
}

fn int(x: u32) -> F {
    num(x as f64)
}

fn one() -> F {
    int(1)
}

/// `sum ln(1 - c/(r x))` over the entries.
fn ln_p2(r: u32, xs: &[u32]) -> F {
    xs.iter()
        .fold(num(0.0), |acc, &x| acc + (one() - one() / int(r * x)).ln())
}

/// `sum ln(1 - 2/(r x y))` over consecutive pairs.
fn ln_p3(r: u32, xs: &[u32]) -> F {
    xs.windows(2)
        .fold(num(0.0), |acc, w| acc + (one() - int(2) / int(r * w[0] * w[1])).ln())
}

fn ln_apex(c: F) -> F {
    (one() - c).ln()
}

fn lnx_over_x(x: u32) -> F {
    int(x).ln() / int(x)
}

fn side(mu: &F, lambda2: &F, xs: &[u32], den: u32) -> F {
    xs.iter().fold(num(0.0), |acc, &x| {
        acc + (mu.clone() * int(x).ln() - lambda2.clone()) / (int(x) * int(den))
    })
}

/// `dual_lhs` evaluated with [`HP_PRECISION`] bits, rounded to `f64`.
pub fn dual_lhs_hp(cert: &DualCertificate, sig: &CaseSignature) -> Result<f64, DualError> {
    // Shape and domain checks are shared with the double-precision path.
    super::dual_lhs(cert, sig)?;
    let [m1, m2, m3, m4] = cert.mu.0.map(num);
    let [l1, l2, l3, l4] = cert.lambda.map(num);
    let value = match (cert.variant, sig) {
        (DualProgram::Gen3, CaseSignature::Triangle(s)) => {
            let (i, j, k) = (int(s.i), int(s.j), int(s.k));
            let ln_q = (ln_p3(s.i, &s.a)
                + ln_p3(s.j, &s.b)
                + ln_p3(s.k, &s.c)
                + ln_apex(int(2) / (i.clone() * k.clone() * int(s.a[0])))
                + ln_apex(int(2) / (i.clone() * j.clone() * int(s.b[0])))
                + ln_apex(int(2) / (j.clone() * k.clone() * int(s.c[0]))))
                / int(2);
            let ln_p = (one() - int(2) / (i * j * k) / ln_q.exp()).ln();
            ln_p + m3 * (lnx_over_x(s.i) + lnx_over_x(s.j) + lnx_over_x(s.k))
                + side(&m4, &l2, &s.a, s.i - 2)
                + side(&m4, &l2, &s.b, s.j - 2)
                + side(&m4, &l2, &s.c, s.k - 2)
                - l1 * (one() / int(s.i) + one() / int(s.j) + one() / int(s.k))
                - l3
        }
        (program, CaseSignature::Edge(s)) => {
            let (i, j) = (int(s.i), int(s.j));
            let half_p2 = (ln_p2(s.i, &s.a) + ln_p2(s.j, &s.b)) / int(2);
            let ln_q = if program == DualProgram::Gen2 {
                ln_p3(s.i, &s.a)
                    + ln_p3(s.j, &s.b)
                    + ln_apex(int(2) / (i.clone() * j.clone() * int(s.a[0])))
                    + ln_apex(int(2) / (i.clone() * j.clone() * int(s.b[0])))
                    + half_p2
            } else {
                half_p2
            };
            let ln_p = (one() - one() / (i * j) / ln_q.exp()).ln();
            let e = if program == DualProgram::R5 { e33_coefficient(s) } else { 0 };
            ln_p + m1 * (lnx_over_x(s.i) + lnx_over_x(s.j))
                + side(&m2, &l2, &s.a, s.i - 1)
                + side(&m2, &l2, &s.b, s.j - 1)
                - l1 * (one() / int(s.i) + one() / int(s.j))
                - l3
                - l4 * num(e as f64)
        }
        _ => unreachable!("shape checked above"),
    };
    Ok(value.to_f64().value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{dual_lhs, edge_sig, triangle_sig};

    #[test]
    fn agrees_with_double_precision() {
        let cases = [
            (DualProgram::Gen2, edge_sig(6, 6, vec![6; 5], vec![6; 5])),
            (DualProgram::Gen2, edge_sig(3, 5, vec![4, 7], vec![5, 3, 9, 6])),
            (DualProgram::Gen3, triangle_sig(4, 5, 6, vec![5, 7], vec![3, 6, 6], vec![4, 4, 5, 6])),
            (DualProgram::R4, edge_sig(4, 4, vec![4; 3], vec![4; 3])),
            (DualProgram::R5, edge_sig(3, 4, vec![3, 5], vec![3, 3, 5])),
        ];
        for (p, sig) in cases {
            let cert = DualCertificate::builtin(p);
            let lo = dual_lhs(&cert, &sig).unwrap();
            let hi = dual_lhs_hp(&cert, &sig).unwrap();
            assert!((lo - hi).abs() < 1e-13, "{p} {sig}: {lo} vs {hi}");
        }
    }

    #[test]
    fn marginal_gen2_value_is_confirmed() {
        let cert = DualCertificate::builtin(DualProgram::Gen2);
        let v = dual_lhs_hp(&cert, &edge_sig(6, 6, vec![6; 5], vec![6; 5])).unwrap();
        assert!(v > 5.7e-7 && v < 5.73e-7, "{v}");
    }
}
