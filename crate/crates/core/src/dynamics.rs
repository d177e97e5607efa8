//! Finite group actions on finite point sets.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::groups::{FiniteGroup, Subgroup};
use crate::{Error, Result};

/// An action `G × X → X` stored as a full table `act[g][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    group: Arc<FiniteGroup>,
    space_size: usize,
    table: Vec<usize>,
}

impl Action {
    /// Validates a full table with one row of images per group element.
    pub fn new(group: Arc<FiniteGroup>, space_size: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() != group.order() {
            return Err(Error::InvalidAction(format!(
                "{} rows for a group of order {}",
                rows.len(),
                group.order()
            )));
        }
        let mut table = Vec::with_capacity(group.order() * space_size);
        for (g, row) in rows.into_iter().enumerate() {
            check_permutation(g, &row, space_size)?;
            table.extend(row);
        }
        let action = Action { group, space_size, table };
        action.check_axioms()?;
        Ok(action)
    }

    /// Extends images of a generating set to the whole group.
    pub fn from_generators(group: Arc<FiniteGroup>, space_size: usize, generators: &[(usize, Vec<usize>)]) -> Result<Self> {
        let n = group.order();
        let mut rows: Vec<Option<Vec<usize>>> = vec![None; n];
        rows[group.identity()] = Some((0..space_size).collect());
        for (g, images) in generators {
            if *g >= n {
                return Err(Error::InvalidAction(format!("generator {g} out of range")));
            }
            check_permutation(*g, images, space_size)?;
        }
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(a) = queue.pop_front() {
            let row_a = rows[a].clone().expect("visited");
            for (s, images) in generators {
                let b = group.mul(a, *s);
                // act(a s)(x) = act(a)(act(s)(x))
                let row_b: Vec<usize> = images.iter().map(|&y| row_a[y]).collect();
                match &rows[b] {
                    None => {
                        rows[b] = Some(row_b);
                        queue.push_back(b);
                    }
                    Some(existing) if *existing != row_b => {
                        return Err(Error::InvalidAction(format!(
                            "generator images are inconsistent with the group law at element {b}"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        if let Some(g) = rows.iter().position(Option::is_none) {
            return Err(Error::InvalidAction(format!("generators do not reach element {g}")));
        }
        Action::new(group, space_size, rows.into_iter().map(Option::unwrap).collect())
    }

    /// `G` acting trivially on `space_size` points.
    pub fn trivial(group: Arc<FiniteGroup>, space_size: usize) -> Self {
        let table = (0..group.order()).flat_map(|_| 0..space_size).collect();
        Action { group, space_size, table }
    }

    /// Builds the table from a closure `(g, x) ↦ g·x` and validates it.
    pub fn from_fn(group: Arc<FiniteGroup>, space_size: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let rows = group.elements().map(|g| (0..space_size).map(|x| f(g, x)).collect()).collect();
        Action::new(group, space_size, rows)
    }

    fn check_axioms(&self) -> Result<()> {
        let g = &self.group;
        for x in 0..self.space_size {
            if self.apply(g.identity(), x) != x {
                return Err(Error::InvalidAction(format!("identity moves point {x}")));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                for x in 0..self.space_size {
                    if self.apply(a, self.apply(b, x)) != self.apply(g.mul(a, b), x) {
                        return Err(Error::InvalidAction(format!("g(hx) != (gh)x for g={a}, h={b}, x={x}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    #[inline]
    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.table[g * self.space_size + x]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.space_size.max(1)).map(<[usize]>::to_vec).collect()
    }

    /// `G`-orbits ordered by their smallest point, each sorted.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.space_size];
        let mut out = Vec::new();
        for x in 0..self.space_size {
            if seen[x] {
                continue;
            }
            let mut orbit: Vec<usize> = self.group.elements().map(|g| self.apply(g, x)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn orbit_of(&self, x: usize) -> Vec<usize> {
        let mut orbit: Vec<usize> = self.group.elements().map(|g| self.apply(g, x)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        orbit
    }

    /// Smallest point of the orbit of `x`.
    pub fn representative(&self, x: usize) -> usize {
        self.group.elements().map(|g| self.apply(g, x)).min().expect("nonempty group")
    }

    /// Some `g` with `g·from = to`.
    pub fn transporter(&self, from: usize, to: usize) -> Option<usize> {
        self.group.elements().find(|&g| self.apply(g, from) == to)
    }

    pub fn stabilizer(&self, x: usize) -> Subgroup {
        let members: Vec<usize> = self.group.elements().filter(|&g| self.apply(g, x) == x).collect();
        Subgroup::from_members(self.group.clone(), members).expect("stabilizers are subgroups")
    }

    /// `X_g = {x : g·x = x}`.
    pub fn fixed_set(&self, g: usize) -> Vec<usize> {
        (0..self.space_size).filter(|&x| self.apply(g, x) == x).collect()
    }

    pub fn fixes(&self, g: usize, x: usize) -> bool {
        self.apply(g, x) == x
    }

    /// `max_g max_x |ν(g·x) − ν(x)|`.
    pub fn check_invariant_measure(&self, nu: &MeasureOnX) -> f64 {
        let mut worst = 0.0f64;
        for g in self.group.elements() {
            for x in 0..self.space_size {
                worst = worst.max((nu.weight(self.apply(g, x)) - nu.weight(x)).abs());
            }
        }
        worst
    }

    /// For a finite space: the uniform probability measures on single orbits.
    pub fn ergodic_invariant_measures(&self) -> Vec<ErgodicMeasure> {
        self.orbits()
            .into_iter()
            .map(|orbit| {
                let mut weights = vec![0.0; self.space_size];
                let w = 1.0 / orbit.len() as f64;
                for &y in &orbit {
                    weights[y] = w;
                }
                ErgodicMeasure {
                    measure: MeasureOnX { weights },
                    stabilizer: self.stabilizer(orbit[0]),
                    orbit,
                }
            })
            .collect()
    }
}

fn check_permutation(g: usize, row: &[usize], n: usize) -> Result<()> {
    if row.len() != n {
        return Err(Error::InvalidAction(format!("row {g} has {} images, expected {n}", row.len())));
    }
    let mut hit = vec![false; n];
    for &y in row {
        if y >= n || hit[y] {
            return Err(Error::InvalidAction(format!("row {g} is not a permutation of 0..{n}")));
        }
        hit[y] = true;
    }
    Ok(())
}

/// A finite measure on the point set.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureOnX {
    weights: Vec<f64>,
}

impl MeasureOnX {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(x) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidMeasure(format!("weight at point {x} is {}", weights[x])));
        }
        Ok(MeasureOnX { weights })
    }

    /// As [`MeasureOnX::new`], additionally requiring total mass 1 within `tol`.
    pub fn probability(weights: Vec<f64>, tol: f64) -> Result<Self> {
        let nu = Self::new(weights)?;
        if (nu.total_mass() - 1.0).abs() > tol {
            return Err(Error::InvalidMeasure(format!("total mass {} is not 1", nu.total_mass())));
        }
        Ok(nu)
    }

    pub fn uniform(n: usize) -> Self {
        MeasureOnX { weights: vec![1.0 / n as f64; n] }
    }

    pub fn dirac(n: usize, x: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[x] = 1.0;
        MeasureOnX { weights }
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// An ergodic invariant probability measure with the common stabilizer of its orbit.
#[derive(Debug, Clone)]
pub struct ErgodicMeasure {
    pub measure: MeasureOnX,
    pub orbit: Vec<usize>,
    pub stabilizer: Subgroup,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(n: usize, m: usize) -> Action {
        // ℤ/n acting on m points by x ↦ x + g mod m (m | n)
        Action::from_fn(Arc::new(FiniteGroup::cyclic(n)), m, |g, x| (x + g) % m).unwrap()
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(rotation(3, 3).orbits(), vec![vec![0, 1, 2]]);
        let triv = Action::trivial(Arc::new(FiniteGroup::cyclic(2)), 2);
        assert_eq!(triv.orbits(), vec![vec![0], vec![1]]);

        // regular action of ℤ/2×ℤ/2 on itself; transitivity by breadth-first closure
        let v4 = Arc::new(FiniteGroup::product(&[2, 2]));
        let reg = Action::from_fn(v4.clone(), 4, |g, x| v4.mul(g, x)).unwrap();
        let mut reached = vec![false; 4];
        let mut queue = VecDeque::from([0]);
        reached[0] = true;
        while let Some(x) = queue.pop_front() {
            for g in 0..4 {
                let y = reg.apply(g, x);
                if !reached[y] {
                    reached[y] = true;
                    queue.push_back(y);
                }
            }
        }
        assert!(reached.iter().all(|&r| r));
        assert_eq!(reg.orbits(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn stabilizer_examples() {
        let free = rotation(3, 3);
        assert_eq!(free.stabilizer(1).members(), &[0]);
        let triv = Action::trivial(Arc::new(FiniteGroup::cyclic(4)), 1);
        assert_eq!(triv.stabilizer(0).order(), 4);
        let z6 = rotation(6, 3);
        for x in 0..3 {
            let brute: Vec<usize> = (0..6).filter(|g| (x + g) % 3 == x).collect();
            assert_eq!(z6.stabilizer(x).members(), brute.as_slice());
            assert_eq!(brute, vec![0, 3]);
        }
    }

    #[test]
    fn fixed_sets() {
        let swap = rotation(2, 2);
        assert_eq!(swap.fixed_set(0), vec![0, 1]);
        assert!(swap.fixed_set(1).is_empty());
        let partial = Action::new(Arc::new(FiniteGroup::cyclic(2)), 3, vec![vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
        assert_eq!(partial.fixed_set(1), vec![2]);
    }

    #[test]
    fn invariant_measures() {
        let swap = rotation(2, 2);
        assert_eq!(swap.check_invariant_measure(&MeasureOnX::uniform(2)), 0.0);
        assert_eq!(swap.check_invariant_measure(&MeasureOnX::dirac(2, 0)), 1.0);
        let partial = Action::new(Arc::new(FiniteGroup::cyclic(2)), 3, vec![vec![0, 1, 2], vec![0, 2, 1]]).unwrap();
        let nu = MeasureOnX::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(partial.check_invariant_measure(&nu), 0.0);
    }

    #[test]
    fn ergodic_measures() {
        assert_eq!(rotation(3, 3).ergodic_invariant_measures().len(), 1);
        let triv = Action::trivial(Arc::new(FiniteGroup::cyclic(2)), 3);
        let ms = triv.ergodic_invariant_measures();
        assert_eq!(ms.len(), 3);
        assert_eq!(ms[1].measure.weights(), &[0.0, 1.0, 0.0]);

        // orbits of sizes 2 and 3 under ℤ/6
        let a = Action::from_fn(Arc::new(FiniteGroup::cyclic(6)), 5, |g, x| if x < 2 { (x + g) % 2 } else { 2 + (x - 2 + g) % 3 })
            .unwrap();
        let ms = a.ergodic_invariant_measures();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].measure.weights(), &[0.5, 0.5, 0.0, 0.0, 0.0]);
        let third = 1.0 / 3.0;
        assert_eq!(ms[1].measure.weights(), &[0.0, 0.0, third, third, third]);
        for m in &ms {
            assert_eq!(a.check_invariant_measure(&m.measure), 0.0);
        }
    }

    #[test]
    fn orbit_stabilizer_and_conjugate_stabilizers() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let perms: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        let natural = Action::from_fn(s3.clone(), 3, |g, x| perms[g][x]).unwrap();
        for x in 0..3 {
            assert_eq!(natural.orbit_of(x).len() * natural.stabilizer(x).order(), 6);
            for g in 0..6 {
                assert_eq!(natural.stabilizer(natural.apply(g, x)), natural.stabilizer(x).conjugated(g));
                for x2 in 0..3 {
                    assert_eq!(natural.fixed_set(g).contains(&x2), natural.stabilizer(x2).contains(g));
                }
            }
        }
    }

    #[test]
    fn generator_input() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let a = Action::from_generators(g.clone(), 4, &[(1, vec![1, 2, 3, 0])]).unwrap();
        assert_eq!(a.apply(2, 0), 2);
        assert!(Action::from_generators(g, 3, &[(1, vec![1, 2, 0])]).is_err());
    }

    #[test]
    fn rejects_non_actions() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        assert!(Action::new(g.clone(), 2, vec![vec![1, 0], vec![1, 0]]).is_err());
        assert!(Action::new(g, 2, vec![vec![0, 1], vec![0, 0]]).is_err());
    }
}
