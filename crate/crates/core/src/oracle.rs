//! Direct evaluation of the equation's left side, and a brute-force solver
//! that assembles the full 64×64 operator and factors it.
//!
//! Nothing here shares code with the constructive pipeline beyond the tensor
//! primitives, so the two can check each other.

use alloc::boxed::Box;

use crate::linalg::{self, Lu, Matrix};
use crate::params::{Coupling, ParameterSet};
use crate::tensor::{
    dual, pseudo_trace, trace, CoVector, DualKind, LeviCivita, Metric, Pattern, Rank3Tensor,
    TraceKind, RANK3_LEN,
};

fn coupling_term(p: &ParameterSet, i: usize, x: &CoVector, g: &Metric) -> Rank3Tensor {
    let (c7, c8, c9) = (
        p.coupling(Coupling::Seven, i),
        p.coupling(Coupling::Eight, i),
        p.coupling(Coupling::Nine, i),
    );
    Rank3Tensor::from_fn(|a, m, n| {
        c7 * x[m] * g.lower(a, n) + c8 * x[n] * g.lower(a, m) + c9 * x[a] * g.lower(m, n)
    })
}

/// `L(N)`, evaluated term by term.
pub fn apply_lhs(p: &ParameterSet, g: &Metric, eps: &LeviCivita, n: &Rank3Tensor) -> Rank3Tensor {
    let mut out = Rank3Tensor::ZERO;
    for (ai, pat) in p.a.iter().zip(Pattern::ALL) {
        if *ai != 0.0 {
            out += *ai * n.permuted(pat);
        }
    }

    let tr = TraceKind::ALL.map(|k| trace(n, k, g));
    for (i, x) in tr.iter().enumerate() {
        out += coupling_term(p, i + 1, x, g);
    }
    out += coupling_term(p, 4, &pseudo_trace(n, eps, g), g);

    for (k, kind) in DualKind::ALL.into_iter().enumerate() {
        let bk = p.b_mat[k];
        if bk.iter().all(|x| *x == 0.0) {
            continue;
        }
        let m = dual(n, kind, eps);
        out += bk[0] * m;
        out += bk[1] * m.permuted(Pattern::NAM);
        out += bk[2] * m.permuted(Pattern::MNA);
    }

    let v = p.b_vec[0] * tr[0] + p.b_vec[1] * tr[1] + p.b_vec[2] * tr[2];
    if v.max_abs() != 0.0 {
        out += Rank3Tensor::from_fn(|a, m, nu| (0..4).map(|r| eps.up1(r, a, m, nu) * v[r]).sum());
    }
    out
}

/// The operator as a dense matrix acting on flat components.
pub type OperatorMatrix = Box<Matrix<RANK3_LEN>>;

/// Column `j` is `L(e_j)`.
pub fn build_operator(p: &ParameterSet, g: &Metric) -> OperatorMatrix {
    let eps = LeviCivita::new(g);
    let mut op: OperatorMatrix = Box::new([[0.0; RANK3_LEN]; RANK3_LEN]);
    for j in 0..RANK3_LEN {
        let mut e = Rank3Tensor::ZERO;
        e.0[j] = 1.0;
        let col = apply_lhs(p, g, &eps, &e);
        for (i, v) in col.0.iter().enumerate() {
            op[i][j] = *v;
        }
    }
    op
}

/// `L(N)` through the assembled operator.
pub fn apply(op: &OperatorMatrix, n: &Rank3Tensor) -> Rank3Tensor {
    Rank3Tensor(linalg::mat_vec(op, &n.0))
}

/// The operator has a zero (or numerically vanishing) pivot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singular {
    pub min_pivot: f64,
}

/// Relative pivot floor below which the operator counts as singular.
pub const PIVOT_REL_TOL: f64 = 1e-13;

/// Determinant of the 64×64 operator.
pub fn operator_det(p: &ParameterSet, g: &Metric) -> f64 {
    Lu::factor(&build_operator(p, g)).det()
}

/// Solves `L(N) = B` by LU on the assembled operator.
pub fn oracle_solve(
    p: &ParameterSet,
    g: &Metric,
    b: &Rank3Tensor,
) -> Result<Rank3Tensor, Singular> {
    let op = build_operator(p, g);
    let scale = linalg::max_norm(&op);
    let lu = Box::new(Lu::factor(&op));
    let min_pivot = lu.min_pivot();
    if min_pivot.is_nan() || min_pivot <= PIVOT_REL_TOL * scale {
        return Err(Singular { min_pivot });
    }
    lu.solve(&b.0)
        .map(Rank3Tensor)
        .ok_or(Singular { min_pivot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PARAM_NAMES;

    fn sample(seed: u64) -> Rank3Tensor {
        let mut x = seed as f64 * 0.618;
        Rank3Tensor::from_fn(|_, _, _| {
            x = (x * 3.7 + 0.41).sin();
            x
        })
    }

    #[test]
    fn identity_is_identity() {
        let g = Metric::minkowski();
        let eps = LeviCivita::new(&g);
        let n = sample(1);
        assert_eq!(apply_lhs(&ParameterSet::identity(), &g, &eps, &n), n);
        assert_eq!(
            apply_lhs(&ParameterSet::ZERO, &g, &eps, &n),
            Rank3Tensor::ZERO
        );
    }

    #[test]
    fn each_parameter_contributes_its_own_term() {
        let g = Metric::minkowski();
        let eps = LeviCivita::new(&g);
        let n = sample(2);
        let tr = TraceKind::ALL.map(|k| trace(&n, k, &g));
        let m = pseudo_trace(&n, &eps, &g);
        let ds = DualKind::ALL.map(|k| dual(&n, k, &eps));

        for name in PARAM_NAMES {
            let mut p = ParameterSet::ZERO;
            p.set(name, 1.0).unwrap();
            let got = apply_lhs(&p, &g, &eps, &n);
            let idx: usize = name[1..].parse().unwrap();
            let expected = match name.as_bytes()[0] {
                b'a' if idx <= 6 => n.permuted(Pattern::ALL[idx - 1]),
                b'a' => {
                    let (fam, i) = (idx / 10, idx % 10);
                    let x = tr[i - 1];
                    Rank3Tensor::from_fn(|a, mu, nu| match fam {
                        7 => x[mu] * g.lower(a, nu),
                        8 => x[nu] * g.lower(a, mu),
                        _ => x[a] * g.lower(mu, nu),
                    })
                }
                b'b' if idx >= 10 => {
                    let (k, l) = (idx / 10, idx % 10);
                    let pat = [Pattern::AMN, Pattern::NAM, Pattern::MNA][l - 1];
                    ds[k - 1].permuted(pat)
                }
                b'b' => {
                    let x = tr[idx - 1];
                    Rank3Tensor::from_fn(|a, mu, nu| {
                        let mut s = 0.0;
                        for r in 0..4 {
                            for q in 0..4 {
                                s += eps.lower(r, a, mu, nu) * g.upper(r, q) * x[q];
                            }
                        }
                        s
                    })
                }
                _ => Rank3Tensor::from_fn(|a, mu, nu| match idx {
                    1 => m[mu] * g.lower(a, nu),
                    2 => m[nu] * g.lower(a, mu),
                    _ => m[a] * g.lower(mu, nu),
                }),
            };
            assert!((got - expected).max_abs() < 1e-13, "{name}");
        }
    }

    #[test]
    fn operator_matches_direct_evaluation() {
        let p = ParameterSet::random(11, 1.0);
        let g = Metric::minkowski();
        let eps = LeviCivita::new(&g);
        let op = build_operator(&p, &g);
        let n = sample(3);
        assert!((apply(&op, &n) - apply_lhs(&p, &g, &eps, &n)).max_abs() < 1e-13);
    }

    #[test]
    fn oracle_solve_round_trip() {
        let p = ParameterSet::random(12, 1.0);
        let g = Metric::euclidean();
        let eps = LeviCivita::new(&g);
        let n = sample(4);
        let b = apply_lhs(&p, &g, &eps, &n);
        let got = oracle_solve(&p, &g, &b).unwrap();
        assert!((got - n).max_abs() < 1e-9);
    }

    #[test]
    fn zero_operator_is_singular() {
        let g = Metric::euclidean();
        assert!(oracle_solve(&ParameterSet::ZERO, &g, &sample(5)).is_err());
        assert_eq!(operator_det(&ParameterSet::ZERO, &g), 0.0);
        assert_eq!(operator_det(&ParameterSet::identity(), &g), 1.0);
    }
}
