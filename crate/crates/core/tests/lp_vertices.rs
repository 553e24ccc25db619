use ftalloc_core::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use ftalloc_core::rational::{int, Rational};
use num_traits::Zero;
use proptest::prelude::*;

/// A hyperplane `a . x = b` in three variables.
type Plane = ([Rational; 3], Rational);

fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

fn solve3(planes: [&Plane; 3]) -> Option<[Rational; 3]> {
    let a = [planes[0].0.clone(), planes[1].0.clone(), planes[2].0.clone()];
    let d = det3(&a);
    if d.is_zero() {
        return None;
    }
    let mut out = [int(0), int(0), int(0)];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut m = a.clone();
        for r in 0..3 {
            m[r][col] = planes[r].1.clone();
        }
        *slot = det3(&m) / &d;
    }
    Some(out)
}

/// Best objective over all basic feasible points, by brute force.
fn vertex_oracle(lp: &LinearProgram, objective: &[Rational]) -> Option<Rational> {
    let mut planes: Vec<Plane> = lp
        .constraints
        .iter()
        .map(|c| ([c.coeffs[0].clone(), c.coeffs[1].clone(), c.coeffs[2].clone()], c.rhs.clone()))
        .collect();
    for i in 0..3 {
        let mut a = [int(0), int(0), int(0)];
        a[i] = int(1);
        planes.push((a, int(0)));
    }
    let mut best: Option<Rational> = None;
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            for k in j + 1..planes.len() {
                let Some(x) = solve3([&planes[i], &planes[j], &planes[k]]) else { continue };
                if !lp.is_feasible_point(&x) {
                    continue;
                }
                let v: Rational = objective.iter().zip(&x).map(|(a, b)| a * b).sum();
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    }
    best
}

/// Some three linearly independent constraints are tight at `x`.
fn is_vertex(lp: &LinearProgram, x: &[Rational]) -> bool {
    let mut tight: Vec<[Rational; 3]> = lp
        .constraints
        .iter()
        .filter(|c| c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<Rational>() == c.rhs)
        .map(|c| [c.coeffs[0].clone(), c.coeffs[1].clone(), c.coeffs[2].clone()])
        .collect();
    for i in 0..3 {
        if x[i].is_zero() {
            let mut a = [int(0), int(0), int(0)];
            a[i] = int(1);
            tight.push(a);
        }
    }
    (0..tight.len()).any(|i| {
        (i + 1..tight.len()).any(|j| {
            (j + 1..tight.len()).any(|k| !det3(&[tight[i].clone(), tight[j].clone(), tight[k].clone()]).is_zero())
        })
    })
}

fn program() -> impl Strategy<Value = (Vec<(Vec<i64>, u8, i64)>, Vec<i64>)> {
    let row = (prop::collection::vec(-3i64..=3, 3), 0u8..3, -4i64..=10);
    (prop::collection::vec(row, 1..5), prop::collection::vec(-3i64..=3, 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn simplex_matches_vertex_enumeration((rows, obj) in program()) {
        let mut lp = LinearProgram::new(3);
        for (a, rel, b) in rows {
            let rel = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
            lp.add(a.into_iter().map(int).collect(), rel, int(b));
        }
        // A box keeps every feasible program bounded, so it has a vertex.
        for i in 0..3 {
            let mut a = vec![int(0); 3];
            a[i] = int(1);
            lp.add(a, Relation::Le, int(5));
        }
        let objective: Vec<Rational> = obj.into_iter().map(int).collect();
        lp.maximize(objective.clone());
        let oracle = vertex_oracle(&lp, &objective);
        match lp_solve(&lp).unwrap() {
            LpOutcome::Infeasible => prop_assert!(oracle.is_none()),
            LpOutcome::Unbounded => prop_assert!(false, "boxed program reported unbounded"),
            LpOutcome::Optimal { point, value } => {
                prop_assert!(lp.is_feasible_point(&point));
                prop_assert!(is_vertex(&lp, &point));
                prop_assert_eq!(Some(value), oracle);
            }
        }
    }
}
