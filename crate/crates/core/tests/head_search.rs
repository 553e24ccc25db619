use ftalloc_core::dist::EmpiricalDist;
use ftalloc_core::head::{find_best_head, head_objective, HeadSearch};
use ftalloc_core::rational::{int, rat, Rational};
use proptest::prelude::*;

const STEP: i64 = 64;

/// Best value over heads in `(1/64) Z` with `sum <= budget`.
fn grid_best(p: &[Rational], tail: &EmpiricalDist, budget: &Rational, theta: &Rational) -> Rational {
    let cap = (budget * int(STEP)).floor().to_integer().try_into().unwrap_or(0i64);
    let mut best = int(-1);
    let mut visit = |u: Vec<Rational>| {
        let v = head_objective(p, &u, tail, theta);
        if v > best {
            best = v;
        }
    };
    match p.len() {
        0 => visit(vec![]),
        1 => (0..=cap).for_each(|a| visit(vec![rat(a, STEP)])),
        _ => {
            for a in 0..=cap {
                for b in 0..=cap - a {
                    visit(vec![rat(a, STEP), rat(b, STEP)]);
                }
            }
        }
    }
    best
}

fn micro(max_m: usize) -> impl Strategy<Value = (Vec<Rational>, EmpiricalDist, Rational, Rational)> {
    (
        prop::collection::vec(1i64..20, 0..=2),
        prop::collection::vec(0i64..=16, 1..=max_m),
        0i64..=8,
        1i64..=16,
    )
        .prop_map(|(p, t, w, theta)| {
            (
                p.into_iter().map(|x| rat(x, 20)).collect(),
                EmpiricalDist::new(t.into_iter().map(|x| rat(x, 16)).collect()),
                rat(w, 8),
                rat(theta, 16),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn chain_literal_and_grid_agree((p, tail, w, theta) in micro(2)) {
        let chain = find_best_head(&p, &tail, &w, &theta, HeadSearch::Chain).unwrap();
        let literal = find_best_head(&p, &tail, &w, &theta, HeadSearch::Literal).unwrap();
        prop_assert_eq!(&chain.value, &literal.value);
        prop_assert_eq!(&chain.value, &grid_best(&p, &tail, &w, &theta));
        prop_assert_eq!(head_objective(&p, &chain.weights, &tail, &theta), chain.value);
        prop_assert!(chain.weights.iter().all(|x| *x >= int(0)));
        prop_assert!(chain.weights.iter().sum::<Rational>() <= w);
    }

    #[test]
    fn chain_matches_grid_with_three_points((p, tail, w, theta) in micro(3)) {
        let chain = find_best_head(&p, &tail, &w, &theta, HeadSearch::Chain).unwrap();
        prop_assert_eq!(chain.value, grid_best(&p, &tail, &w, &theta));
    }

    #[test]
    fn value_grows_with_budget((p, tail, w, theta) in micro(3)) {
        let base = find_best_head(&p, &tail, &w, &theta, HeadSearch::Chain).unwrap().value;
        let more = (&w + rat(1, 8)).min(int(1));
        prop_assert!(find_best_head(&p, &tail, &more, &theta, HeadSearch::Chain).unwrap().value >= base);
    }
}
