//! Finite distributions on the rationals, empirical distributions and the
//! Kolmogorov distance between them.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::rational::{int, Rational};

/// A distribution with finitely many atoms, kept sorted by value with
/// merged duplicates and strictly positive masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteDist {
    atoms: Vec<(Rational, Rational)>,
}

impl DiscreteDist {
    pub fn point_mass(at: Rational) -> Self {
        DiscreteDist {
            atoms: vec![(at, Rational::one())],
        }
    }

    /// Uniform over the given points (duplicates add mass).
    pub fn uniform(points: &[Rational]) -> Self {
        let share = Rational::new(1.into(), (points.len() as i64).into());
        Self::from_atoms(points.iter().map(|p| (p.clone(), share.clone())))
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (v, m) in atoms {
            *merged.entry(v).or_insert_with(Rational::zero) += m;
        }
        Self::from_map(merged)
    }

    pub(crate) fn from_map(map: BTreeMap<Rational, Rational>) -> Self {
        DiscreteDist {
            atoms: map.into_iter().filter(|(_, m)| m.is_positive()).collect(),
        }
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// `Pr[Z <= t]`.
    pub fn cdf(&self, t: &Rational) -> Rational {
        self.atoms
            .iter()
            .take_while(|(v, _)| v <= t)
            .map(|(_, m)| m)
            .sum()
    }

    /// `Pr[Z >= t]`.
    pub fn mass_at_least(&self, t: &Rational) -> Rational {
        let start = self.atoms.partition_point(|(v, _)| v < t);
        self.atoms[start..].iter().map(|(_, m)| m).sum()
    }

    /// Distribution of `Z + Y` for independent `Y`.
    pub fn convolve(&self, other: &DiscreteDist) -> DiscreteDist {
        let mut out: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (a, ma) in &self.atoms {
            for (b, mb) in &other.atoms {
                *out.entry(a + b).or_insert_with(Rational::zero) += ma * mb;
            }
        }
        Self::from_map(out)
    }

    pub fn mean(&self) -> Rational {
        self.atoms.iter().map(|(v, m)| v * m).sum()
    }
}

/// Uniform distribution over a multiset of sampled points, stored as
/// distinct values with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalDist {
    counts: Vec<(Rational, u64)>,
    m: u64,
}

impl EmpiricalDist {
    /// Panics on an empty sample.
    pub fn new(points: Vec<Rational>) -> Self {
        Self::from_counts(points.into_iter().map(|p| (p, 1)))
    }

    /// Panics if the total count is zero.
    pub fn from_counts(counts: impl IntoIterator<Item = (Rational, u64)>) -> Self {
        let mut merged: BTreeMap<Rational, u64> = BTreeMap::new();
        for (v, c) in counts {
            *merged.entry(v).or_insert(0) += c;
        }
        let counts: Vec<(Rational, u64)> = merged.into_iter().filter(|(_, c)| *c > 0).collect();
        let m = counts.iter().map(|(_, c)| c).sum();
        assert!(m > 0, "empirical distribution needs at least one point");
        EmpiricalDist { counts, m }
    }

    /// Sample size.
    pub fn len(&self) -> u64 {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Distinct points with their multiplicities, ascending.
    pub fn counts(&self) -> &[(Rational, u64)] {
        &self.counts
    }

    /// The sorted sample with repetitions.
    pub fn points(&self) -> impl Iterator<Item = &Rational> {
        self.counts.iter().flat_map(|(v, c)| std::iter::repeat_n(v, *c as usize))
    }

    pub fn to_discrete(&self) -> DiscreteDist {
        let m = int(self.m as i64);
        DiscreteDist {
            atoms: self
                .counts
                .iter()
                .map(|(v, c)| (v.clone(), int(*c as i64) / &m))
                .collect(),
        }
    }
}

impl From<&EmpiricalDist> for DiscreteDist {
    fn from(e: &EmpiricalDist) -> Self {
        e.to_discrete()
    }
}

/// `sup_t |F_1(t) - F_2(t)|`, exact. Both CDFs are step functions, so the
/// supremum is attained at a jump point of one of them.
pub fn kolmogorov_distance(d1: &DiscreteDist, d2: &DiscreteDist) -> Rational {
    let (a, b) = (d1.atoms(), d2.atoms());
    let (mut i, mut j) = (0, 0);
    let (mut f1, mut f2) = (Rational::zero(), Rational::zero());
    let mut best = Rational::zero();
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some((x, _)), Some((y, _))) => x.min(y).clone(),
            (Some((x, _)), None) => x.clone(),
            (None, Some((y, _))) => y.clone(),
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i].0 == next {
            f1 += &a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == next {
            f2 += &b[j].1;
            j += 1;
        }
        let gap = (&f1 - &f2).abs();
        if gap > best {
            best = gap;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn identical_distributions_are_at_distance_zero() {
        let d = DiscreteDist::uniform(&[int(0), rat(1, 3), int(1)]);
        assert_eq!(kolmogorov_distance(&d, &d), int(0));
    }

    #[test]
    fn disjoint_point_masses_are_at_distance_one() {
        let d = kolmogorov_distance(&DiscreteDist::point_mass(int(0)), &DiscreteDist::point_mass(int(1)));
        assert_eq!(d, int(1));
    }

    #[test]
    fn two_versus_three_point_uniform() {
        // Jumps: at 0: 1/2 vs 1/3; at 1/2: 1/2 vs 2/3; at 1: 1 vs 1.
        let d1 = DiscreteDist::uniform(&[int(0), int(1)]);
        let d2 = DiscreteDist::uniform(&[int(0), rat(1, 2), int(1)]);
        assert_eq!(kolmogorov_distance(&d1, &d2), rat(1, 6));
        assert_eq!(kolmogorov_distance(&d2, &d1), rat(1, 6));
    }

    #[test]
    fn sum_with_common_independent_part_does_not_increase_distance() {
        let x = DiscreteDist::from_atoms([(int(0), rat(1, 3)), (rat(1, 4), rat(2, 3))]);
        let y = DiscreteDist::uniform(&[int(0), int(1)]);
        let z = DiscreteDist::uniform(&[int(0), rat(1, 2), int(1)]);
        let lhs = kolmogorov_distance(&x.convolve(&y), &x.convolve(&z));
        assert!(lhs <= kolmogorov_distance(&y, &z));
    }

    #[test]
    fn empirical_counts_and_cdf() {
        let e = EmpiricalDist::new(vec![int(1), int(0), int(1), rat(1, 2)]);
        assert_eq!(e.counts(), [(int(0), 1), (rat(1, 2), 1), (int(1), 2)]);
        assert_eq!(e.len(), 4);
        assert_eq!(e.points().cloned().collect::<Vec<_>>(), vec![int(0), rat(1, 2), int(1), int(1)]);
        let d = e.to_discrete();
        assert_eq!(d.cdf(&rat(1, 2)), rat(1, 2));
        assert_eq!(d.mass_at_least(&rat(1, 2)), rat(3, 4));
        assert_eq!(d.total_mass(), int(1));
    }
}
