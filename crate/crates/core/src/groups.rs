//! Finite groups given by Cayley tables, subgroups, characters of abelian
//! groups, sections of quotient maps and the 2-cocycles they induce.
//!
//! Character and cocycle values are kept as exact rotation numbers
//! ([`Angle`]); complex values only appear through [`Angle::to_complex`].

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::Zero;

use crate::linalg::{c, C64};
use crate::{Error, Result};

/// Largest group order accepted by [`FiniteGroup::from_table`].
pub const DEFAULT_ORDER_BOUND: usize = 512;

/// A rotation number `p/q ∈ [0, 1)`, standing for `exp(2πi p/q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Angle(Ratio<i64>);

impl Angle {
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0, "angle denominator must be nonzero");
        let r = Ratio::new(p, q);
        Angle(r - r.floor())
    }

    pub fn zero() -> Self {
        Angle(Ratio::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn times(self, k: i64) -> Self {
        let r = self.0 * Ratio::from_integer(k);
        Angle(r - r.floor())
    }

    /// `exp(2πi·self)`; quarter turns are returned exactly.
    pub fn to_complex(self) -> C64 {
        match (self.numer(), self.denom()) {
            (0, _) => c(1.0, 0.0),
            (1, 2) => c(-1.0, 0.0),
            (1, 4) => c(0.0, 1.0),
            (3, 4) => c(0.0, -1.0),
            (p, q) => {
                let theta = std::f64::consts::TAU * p as f64 / q as f64;
                c(theta.cos(), theta.sin())
            }
        }
    }

    pub fn as_fraction(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        let r = self.0 + rhs.0;
        Angle(r - r.floor())
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        let r = -self.0;
        Angle(r - r.floor())
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl TryFrom<String> for Angle {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Angle> for String {
    fn from(a: Angle) -> String {
        a.to_string()
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("cannot parse angle {s:?}, expected \"p/q\""));
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Angle::new(p, q))
            }
            None => Ok(Angle::new(s.parse().map_err(|_| bad())?, 1)),
        }
    }
}

/// Isomorphism of an abelian group with `ℤ/n_1 × … × ℤ/n_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianForm {
    pub orders: Vec<usize>,
    /// Element realizing the `i`-th unit vector.
    pub generators: Vec<usize>,
    coords: Vec<Vec<usize>>,
    from_coords: HashMap<Vec<usize>, usize>,
}

impl AbelianForm {
    pub fn coords(&self, g: usize) -> &[usize] {
        &self.coords[g]
    }

    pub fn element(&self, coords: &[usize]) -> usize {
        self.from_coords[coords]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    identity: usize,
    abelian: Option<AbelianForm>,
}

impl FiniteGroup {
    /// Validates a Cayley table (`table[a][b] = ab`) with the default order bound.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_table_with_bound(table, DEFAULT_ORDER_BOUND)
    }

    pub fn from_table_with_bound(table: Vec<Vec<usize>>, bound: usize) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::MalformedTable("empty table".into()));
        }
        if n > bound {
            return Err(Error::GroupTooLarge { order: n, bound });
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedTable(format!("row {a} has length {}, expected {n}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(Error::MalformedTable(format!("entry {bad} in row {a} out of range")));
            }
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let m = |a: usize, b: usize| flat[a * n + b];

        let identity = (0..n)
            .find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a))
            .ok_or(Error::NoIdentity)?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| m(a, b) == identity && m(b, a) == identity)
                .ok_or(Error::BadInverse(a))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for cc in 0..n {
                    if m(ab, cc) != m(a, m(b, cc)) {
                        return Err(Error::NonAssociative(a, b, cc));
                    }
                }
            }
        }
        let mut group = FiniteGroup { order: n, table: flat, inverse, identity, abelian: None };
        if group.commutes() {
            group.abelian = Some(group.search_abelian_form());
        }
        Ok(group)
    }

    /// `ℤ/n` with element `k` standing for the residue `k`.
    pub fn cyclic(n: usize) -> Self {
        Self::product(&[n])
    }

    /// `ℤ/n_1 × … × ℤ/n_k`, elements numbered lexicographically in their coordinates.
    pub fn product(orders: &[usize]) -> Self {
        assert!(!orders.is_empty() && orders.iter().all(|&n| n > 0), "cyclic orders must be positive");
        let order: usize = orders.iter().product();
        let coords: Vec<Vec<usize>> = (0..order).map(|g| mixed_radix(g, orders)).collect();
        let index = |cs: &[usize]| cs.iter().zip(orders).fold(0, |acc, (&a, &n)| acc * n + a);
        let mut table = vec![0; order * order];
        let mut inverse = vec![0; order];
        for a in 0..order {
            let neg: Vec<usize> = coords[a].iter().zip(orders).map(|(&x, &n)| (n - x) % n).collect();
            inverse[a] = index(&neg);
            for b in 0..order {
                let sum: Vec<usize> = coords[a]
                    .iter()
                    .zip(&coords[b])
                    .zip(orders)
                    .map(|((&x, &y), &n)| (x + y) % n)
                    .collect();
                table[a * order + b] = index(&sum);
            }
        }
        let generators = (0..orders.len())
            .map(|i| {
                let mut unit = vec![0; orders.len()];
                unit[i] = 1 % orders[i];
                index(&unit)
            })
            .collect();
        let from_coords = coords.iter().cloned().enumerate().map(|(g, cs)| (cs, g)).collect();
        FiniteGroup {
            order,
            table,
            inverse,
            identity: 0,
            abelian: Some(AbelianForm { orders: orders.to_vec(), generators, coords, from_coords }),
        }
    }

    /// The symmetric group on `n` letters; elements are permutations in
    /// lexicographic order and `ab` applies `b` first.
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        let index: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index[&b.iter().map(|&i| a[i]).collect::<Vec<_>>()]).collect())
            .collect();
        Self::from_table(table).expect("symmetric group table is valid")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian.is_some()
    }

    pub fn abelian_form(&self) -> Option<&AbelianForm> {
        self.abelian.as_ref()
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    fn commutes(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Backtracking search for generators `g_1, …, g_k` with non-increasing
    /// orders such that `(a_i) ↦ Σ a_i g_i` is a bijection from the product of
    /// cyclic groups.
    fn search_abelian_form(&self) -> AbelianForm {
        let mut candidates: Vec<(usize, usize)> =
            self.elements().filter(|&g| g != self.identity).map(|g| (self.element_order(g), g)).collect();
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut span = vec![false; self.order];
        span[self.identity] = true;
        let mut chosen = Vec::new();
        if self.order > 1 {
            let found = self.extend_basis(&candidates, &mut span, 1, &mut chosen, usize::MAX);
            debug_assert!(found, "every finite abelian group is a product of cyclic groups");
        }
        let orders: Vec<usize> = if chosen.is_empty() { vec![1] } else { chosen.iter().map(|&(o, _)| o).collect() };
        let generators: Vec<usize> =
            if chosen.is_empty() { vec![self.identity] } else { chosen.iter().map(|&(_, g)| g).collect() };

        let mut coords = vec![Vec::new(); self.order];
        let total: usize = orders.iter().product();
        for idx in 0..total {
            let cs = mixed_radix(idx, &orders);
            let g = cs.iter().zip(&generators).fold(self.identity, |acc, (&a, &gen)| self.mul(acc, self.power(gen, a)));
            coords[g] = cs;
        }
        let from_coords = coords.iter().cloned().enumerate().map(|(g, cs)| (cs, g)).collect();
        AbelianForm { orders, generators, coords, from_coords }
    }

    fn extend_basis(
        &self,
        candidates: &[(usize, usize)],
        span: &mut Vec<bool>,
        span_size: usize,
        chosen: &mut Vec<(usize, usize)>,
        max_order: usize,
    ) -> bool {
        if span_size == self.order {
            return true;
        }
        for &(ord, g) in candidates {
            if ord > max_order || span[g] {
                continue;
            }
            // <g> must meet the current span trivially
            let mut x = g;
            let mut trivial = true;
            for _ in 1..ord {
                if span[x] {
                    trivial = false;
                    break;
                }
                x = self.mul(x, g);
            }
            if !trivial {
                continue;
            }
            let old: Vec<usize> = self.elements().filter(|&s| span[s]).collect();
            let mut next = span.clone();
            let mut p = g;
            for _ in 1..ord {
                for &s in &old {
                    next[self.mul(s, p)] = true;
                }
                p = self.mul(p, g);
            }
            chosen.push((ord, g));
            if self.extend_basis(candidates, &mut next, span_size * ord, chosen, ord) {
                *span = next;
                return true;
            }
            chosen.pop();
        }
        false
    }

    pub fn power(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }
}

fn mixed_radix(mut idx: usize, orders: &[usize]) -> Vec<usize> {
    let mut out = vec![0; orders.len()];
    for i in (0..orders.len()).rev() {
        out[i] = idx % orders[i];
        idx /= orders[i];
    }
    out
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|v| if v >= first { v + 1 } else { v }));
            out.push(p);
        }
    }
    out
}

/// A subgroup, stored as its sorted member list.
#[derive(Debug, Clone)]
pub struct Subgroup {
    group: Arc<FiniteGroup>,
    members: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.group, &other.group) || self.group == other.group) && self.members == other.members
    }
}

impl Subgroup {
    pub fn from_members(group: Arc<FiniteGroup>, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&g| g >= group.order()) {
            return Err(Error::NotSubgroup(format!("element {bad} out of range")));
        }
        if members.binary_search(&group.identity()).is_err() {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for &a in &members {
            if members.binary_search(&group.inv(a)).is_err() {
                return Err(Error::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in &members {
                if members.binary_search(&group.mul(a, b)).is_err() {
                    return Err(Error::NotSubgroup(format!("product of {a} and {b} missing")));
                }
            }
        }
        Ok(Subgroup { group, members })
    }

    /// The subgroup generated by `generators`.
    pub fn generated(group: Arc<FiniteGroup>, generators: &[usize]) -> Result<Self> {
        if let Some(&bad) = generators.iter().find(|&&g| g >= group.order()) {
            return Err(Error::NotSubgroup(format!("generator {bad} out of range")));
        }
        let mut seen = vec![false; group.order()];
        seen[group.identity()] = true;
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(a) = queue.pop_front() {
            for &s in generators {
                let b = group.mul(a, s);
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        let members = (0..group.order()).filter(|&g| seen[g]).collect();
        Ok(Subgroup { group, members })
    }

    pub fn whole(group: Arc<FiniteGroup>) -> Self {
        let members = group.elements().collect();
        Subgroup { group, members }
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let members = vec![group.identity()];
        Subgroup { group, members }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.group.order() / self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    /// Position of `g` in the member list.
    pub fn position(&self, g: usize) -> Option<usize> {
        self.members.binary_search(&g).ok()
    }

    pub fn is_normal(&self) -> bool {
        self.group.elements().all(|g| self.members.iter().all(|&h| self.contains(self.group.conjugate(g, h))))
    }

    /// `g H g⁻¹`.
    pub fn conjugated(&self, g: usize) -> Subgroup {
        let mut members: Vec<usize> = self.members.iter().map(|&h| self.group.conjugate(g, h)).collect();
        members.sort_unstable();
        Subgroup { group: self.group.clone(), members }
    }
}

/// A one-dimensional character of an abelian subgroup, `χ(h) = exp(2πi·angle(h))`.
#[derive(Debug, Clone)]
pub struct Character {
    domain: Subgroup,
    angles: Vec<Angle>,
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.angles == other.angles
    }
}

impl Character {
    /// Validates multiplicativity exactly on all pairs of the domain.
    pub fn new(domain: Subgroup, angles: Vec<Angle>) -> Result<Self> {
        if angles.len() != domain.order() {
            return Err(Error::InvalidCharacter(format!(
                "{} values for a subgroup of order {}",
                angles.len(),
                domain.order()
            )));
        }
        let g = domain.group().clone();
        for (i, &a) in domain.members().iter().enumerate() {
            for (j, &b) in domain.members().iter().enumerate() {
                let k = domain.position(g.mul(a, b)).expect("subgroup is closed");
                if angles[k] != angles[i] + angles[j] {
                    return Err(Error::InvalidCharacter(format!("not multiplicative on ({a}, {b})")));
                }
            }
        }
        Ok(Character { domain, angles })
    }

    /// Builds a character from a sparse angle map; missing elements are
    /// filled in from the given ones when they generate the subgroup.
    pub fn from_angle_map(domain: Subgroup, given: &HashMap<usize, Angle>) -> Result<Self> {
        let g = domain.group().clone();
        let mut angles: Vec<Option<Angle>> = vec![None; domain.order()];
        for (&el, &ang) in given {
            let pos = domain
                .position(el)
                .ok_or_else(|| Error::InvalidCharacter(format!("element {el} not in the domain")))?;
            angles[pos] = Some(ang);
        }
        let e = domain.position(g.identity()).expect("identity in subgroup");
        match angles[e] {
            Some(a) if !a.is_zero() => return Err(Error::InvalidCharacter("value at identity must be 1".into())),
            _ => angles[e] = Some(Angle::zero()),
        }
        let seeds: Vec<(usize, Angle)> =
            given.iter().map(|(&el, &a)| (el, a)).collect();
        let mut queue: VecDeque<usize> = domain.members().iter().copied().filter(|&m| angles[domain.position(m).unwrap()].is_some()).collect();
        while let Some(a) = queue.pop_front() {
            let va = angles[domain.position(a).unwrap()].unwrap();
            for &(s, vs) in &seeds {
                let b = g.mul(a, s);
                let pb = domain.position(b).unwrap();
                if angles[pb].is_none() {
                    angles[pb] = Some(va + vs);
                    queue.push_back(b);
                }
            }
        }
        if let Some(missing) = angles.iter().position(Option::is_none) {
            return Err(Error::InvalidCharacter(format!(
                "given values do not determine the character at {}",
                domain.members()[missing]
            )));
        }
        Character::new(domain, angles.into_iter().map(Option::unwrap).collect())
    }

    pub fn trivial(domain: Subgroup) -> Self {
        let angles = vec![Angle::zero(); domain.order()];
        Character { domain, angles }
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn angle(&self, g: usize) -> Option<Angle> {
        self.domain.position(g).map(|i| self.angles[i])
    }

    pub fn value(&self, g: usize) -> Option<C64> {
        self.angle(g).map(Angle::to_complex)
    }

    pub fn is_trivial(&self) -> bool {
        self.angles.iter().all(Angle::is_zero)
    }

    pub fn restrict(&self, sub: &Subgroup) -> Result<Character> {
        let angles = sub
            .members()
            .iter()
            .map(|&h| self.angle(h).ok_or_else(|| Error::InvalidCharacter(format!("{h} outside the domain"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Character { domain: sub.clone(), angles })
    }

    /// Pointwise product (sum of angles); both factors need the same domain.
    pub fn product(&self, other: &Character) -> Result<Character> {
        if self.domain != other.domain {
            return Err(Error::InvalidCharacter("product of characters on different domains".into()));
        }
        let angles = self.angles.iter().zip(&other.angles).map(|(&a, &b)| a + b).collect();
        Ok(Character { domain: self.domain.clone(), angles })
    }
}

/// All characters of an abelian group, in mixed-radix order of the dual coordinates.
pub fn dual_group(group: &Arc<FiniteGroup>) -> Result<Vec<Character>> {
    let form = group.abelian_form().ok_or(Error::NotAbelian)?;
    let whole = Subgroup::whole(group.clone());
    let total: usize = form.orders.iter().product();
    Ok((0..total)
        .map(|idx| {
            let k = mixed_radix(idx, &form.orders);
            let angles = group
                .elements()
                .map(|g| {
                    form.coords(g)
                        .iter()
                        .zip(&k)
                        .zip(&form.orders)
                        .fold(Angle::zero(), |acc, ((&a, &ki), &n)| acc + Angle::new((a * ki) as i64, n as i64))
                })
                .collect();
            Character { domain: whole.clone(), angles }
        })
        .collect())
}

/// The distinct characters of a subgroup of an abelian group (restrictions of the dual).
pub fn subgroup_characters(sub: &Subgroup) -> Result<Vec<Character>> {
    let mut out: Vec<Character> = Vec::new();
    for chi in dual_group(sub.group())? {
        let r = chi.restrict(sub)?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

/// `H^⊥ = {χ : χ|_H ≡ 1}`.
pub fn annihilator(sub: &Subgroup, duals: &[Character]) -> Vec<Character> {
    duals
        .iter()
        .filter(|chi| sub.members().iter().all(|&h| chi.angle(h).is_some_and(|a| a.is_zero())))
        .cloned()
        .collect()
}

/// A section `s: G/H → G` of the quotient map, with `s(ē) = e`.
#[derive(Debug, Clone)]
pub struct Section {
    subgroup: Subgroup,
    reps: Vec<usize>,
    coset_of: Vec<usize>,
}

impl Section {
    /// Smallest element of each coset; cosets are numbered by increasing representative.
    pub fn smallest(subgroup: &Subgroup) -> Self {
        let g = subgroup.group();
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for a in g.elements() {
            if coset_of[a] == usize::MAX {
                let q = reps.len();
                reps.push(a);
                for &h in subgroup.members() {
                    coset_of[g.mul(a, h)] = q;
                }
            }
        }
        Section { subgroup: subgroup.clone(), reps, coset_of }
    }

    /// Overrides the representatives; cosets are numbered as in [`Section::smallest`].
    pub fn with_representatives(subgroup: &Subgroup, reps: Vec<usize>) -> Result<Self> {
        let base = Self::smallest(subgroup);
        if reps.len() != base.reps.len() {
            return Err(Error::InvalidSection(format!("{} representatives for {} cosets", reps.len(), base.reps.len())));
        }
        for (q, &r) in reps.iter().enumerate() {
            if r >= subgroup.group().order() || base.coset_of[r] != q {
                return Err(Error::InvalidSection(format!("representative {r} is not in coset {q}")));
            }
        }
        if reps[base.coset_of[subgroup.group().identity()]] != subgroup.group().identity() {
            return Err(Error::InvalidSection("identity coset must be represented by e".into()));
        }
        Ok(Section { subgroup: subgroup.clone(), reps, ..base })
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn rep(&self, q: usize) -> usize {
        self.reps[q]
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn coset(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    pub fn quotient_order(&self) -> usize {
        self.reps.len()
    }

    /// Multiplication table of `G/H` in coset numbering.
    pub fn quotient_group(&self) -> Result<FiniteGroup> {
        if !self.subgroup.is_normal() {
            return Err(Error::InvalidSection("subgroup is not normal".into()));
        }
        let g = self.subgroup.group();
        let table = self
            .reps
            .iter()
            .map(|&a| self.reps.iter().map(|&b| self.coset_of[g.mul(a, b)]).collect())
            .collect();
        FiniteGroup::from_table(table)
    }
}

/// A `𝕋`-valued 2-cocycle on `G/H`, values as rotation numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    quotient_order: usize,
    values: Vec<Angle>,
}

impl Cocycle {
    pub fn quotient_order(&self) -> usize {
        self.quotient_order
    }

    pub fn angle(&self, a: usize, b: usize) -> Angle {
        self.values[a * self.quotient_order + b]
    }

    pub fn value(&self, a: usize, b: usize) -> C64 {
        self.angle(a, b).to_complex()
    }

    /// First triple violating `ω(a,b)ω(ab,c) = ω(b,c)ω(a,bc)`, if any.
    pub fn identity_violation(&self, quotient: &FiniteGroup) -> Option<(usize, usize, usize)> {
        let n = self.quotient_order;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    let lhs = self.angle(a, b) + self.angle(quotient.mul(a, b), cc);
                    let rhs = self.angle(b, cc) + self.angle(a, quotient.mul(b, cc));
                    if lhs != rhs {
                        return Some((a, b, cc));
                    }
                }
            }
        }
        None
    }

    pub fn is_normalized(&self, quotient: &FiniteGroup) -> bool {
        let e = quotient.identity();
        (0..self.quotient_order).all(|a| self.angle(e, a).is_zero() && self.angle(a, e).is_zero())
    }
}

/// `ω(a, b) = χ(s(a) s(b) s(ab)⁻¹)`.
pub fn cocycle_from_section(chi: &Character, section: &Section) -> Result<Cocycle> {
    let g = section.subgroup().group();
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if chi.domain() != section.subgroup() {
        return Err(Error::InvalidCharacter("character is not defined on the section's subgroup".into()));
    }
    let quotient = section.quotient_group()?;
    let n = section.quotient_order();
    let mut values = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let ab = quotient.mul(a, b);
            let h = g.mul(g.mul(section.rep(a), section.rep(b)), g.inv(section.rep(ab)));
            values.push(chi.angle(h).ok_or(Error::SectionMismatch(a, b))?);
        }
    }
    Ok(Cocycle { quotient_order: n, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3_table() -> Vec<Vec<usize>> {
        FiniteGroup::symmetric(3).table()
    }

    #[test]
    fn z2_table_is_cyclic() {
        let g = FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(g.abelian_form().unwrap().orders, vec![2]);
    }

    #[test]
    fn absorbing_element_has_no_inverse() {
        let err = FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).unwrap_err();
        assert_eq!(err, Error::BadInverse(1));
    }

    #[test]
    fn s3_is_not_abelian() {
        let table = s3_table();
        // exhaustive pair scan as the oracle
        let commutative = (0..6).all(|a| (0..6).all(|b| table[a][b] == table[b][a]));
        assert!(!commutative);
        let g = FiniteGroup::from_table(table).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.abelian_form().is_none());
    }

    #[test]
    fn non_associative_loop_is_rejected() {
        // a Latin square with identity 0 and inverses, but not associative
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(table), Err(Error::NonAssociative(..))));
    }

    #[test]
    fn missing_identity() {
        assert_eq!(FiniteGroup::from_table(vec![vec![1, 0], vec![0, 0]]).unwrap_err(), Error::NoIdentity);
    }

    #[test]
    fn order_bound() {
        let table = FiniteGroup::cyclic(6).table();
        assert!(matches!(FiniteGroup::from_table_with_bound(table, 4), Err(Error::GroupTooLarge { .. })));
    }

    #[test]
    fn abelian_form_from_tables() {
        for orders in [vec![2, 2], vec![4, 2], vec![2, 3], vec![2, 2, 2], vec![3, 3], vec![4, 4, 2]] {
            let known = FiniteGroup::product(&orders);
            let g = FiniteGroup::from_table(known.table()).unwrap();
            let form = g.abelian_form().unwrap();
            assert_eq!(form.orders.iter().product::<usize>(), g.order());
            for a in g.elements() {
                for b in g.elements() {
                    let sum: Vec<usize> = form
                        .coords(a)
                        .iter()
                        .zip(form.coords(b))
                        .zip(&form.orders)
                        .map(|((x, y), n)| (x + y) % n)
                        .collect();
                    assert_eq!(form.element(&sum), g.mul(a, b));
                }
            }
        }
        // ℤ/2 × ℤ/3 is cyclic of order 6
        let g = FiniteGroup::from_table(FiniteGroup::product(&[2, 3]).table()).unwrap();
        assert_eq!(g.abelian_form().unwrap().orders, vec![6]);
    }

    #[test]
    fn duals_of_small_groups() {
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let d = dual_group(&z2).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d[0].is_trivial());
        assert_eq!(d[1].value(1).unwrap(), c(-1.0, 0.0));

        let z3 = Arc::new(FiniteGroup::cyclic(3));
        for chi in dual_group(&z3).unwrap() {
            for g in 0..3 {
                let v = chi.value(g).unwrap();
                assert!((v * v * v - c(1.0, 0.0)).norm() < 1e-12);
            }
        }

        // ℤ/2×ℤ/2: brute-force enumeration of sign assignments that are homomorphisms
        let v4 = Arc::new(FiniteGroup::product(&[2, 2]));
        let mut brute = Vec::new();
        for mask in 0..16u32 {
            let val = |g: usize| if mask >> g & 1 == 1 { -1.0 } else { 1.0 };
            if (0..4).all(|a| (0..4).all(|b| val(v4.mul(a, b)) == val(a) * val(b))) {
                brute.push((0..4).map(val).collect::<Vec<f64>>());
            }
        }
        let duals = dual_group(&v4).unwrap();
        assert_eq!(duals.len(), brute.len());
        for chi in &duals {
            let vals: Vec<f64> = (0..4).map(|g| chi.value(g).unwrap().re).collect();
            assert!((0..4).all(|g| chi.value(g).unwrap().im == 0.0));
            assert!(brute.contains(&vals));
        }
    }

    #[test]
    fn dual_orthogonality_and_closure() {
        let g = Arc::new(FiniteGroup::product(&[2, 4]));
        let duals = dual_group(&g).unwrap();
        assert_eq!(duals.len(), 8);
        for (i, a) in duals.iter().enumerate() {
            for (j, b) in duals.iter().enumerate() {
                let ip: C64 = g.elements().map(|x| a.value(x).unwrap() * b.value(x).unwrap().conj()).sum::<C64>() / 8.0;
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(expect, 0.0)).norm() < 1e-12);
                assert!(duals.contains(&a.product(b).unwrap()));
            }
        }
    }

    #[test]
    fn annihilators() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let duals = dual_group(&g).unwrap();
        assert_eq!(annihilator(&Subgroup::whole(g.clone()), &duals).len(), 1);
        assert_eq!(annihilator(&Subgroup::trivial(g.clone()), &duals).len(), 4);
        let h = Subgroup::from_members(g.clone(), [0, 2]).unwrap();
        let perp = annihilator(&h, &duals);
        // brute force: characters k with exp(2πi·2k/4) = 1
        let brute: Vec<usize> = (0..4).filter(|k| (2 * k) % 4 == 0).collect();
        assert_eq!(perp.len(), brute.len());
        for chi in &perp {
            assert!(chi.angle(2).unwrap().is_zero());
        }
    }

    #[test]
    fn subgroup_validation() {
        let g = Arc::new(FiniteGroup::cyclic(6));
        assert!(Subgroup::from_members(g.clone(), [0, 2]).is_err());
        assert_eq!(Subgroup::generated(g.clone(), &[2]).unwrap().members(), &[0, 2, 4]);
        assert_eq!(Subgroup::generated(g, &[]).unwrap().members(), &[0]);
    }

    #[test]
    fn subgroup_character_count() {
        let g = Arc::new(FiniteGroup::product(&[2, 4]));
        let h = Subgroup::generated(g.clone(), &[2]).unwrap();
        assert_eq!(subgroup_characters(&h).unwrap().len(), h.order());
    }

    #[test]
    fn cocycle_examples() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let h = Subgroup::from_members(g.clone(), [0, 2]).unwrap();
        let s = Section::smallest(&h);
        assert_eq!(s.reps(), &[0, 1]);
        let sign = Character::new(h.clone(), vec![Angle::zero(), Angle::new(1, 2)]).unwrap();
        let w = cocycle_from_section(&sign, &s).unwrap();
        assert_eq!(w.value(1, 1), c(-1.0, 0.0));
        assert_eq!(w.value(0, 1), c(1.0, 0.0));
        let q = s.quotient_group().unwrap();
        assert!(w.identity_violation(&q).is_none());
        assert!(w.is_normalized(&q));

        let triv = cocycle_from_section(&Character::trivial(h.clone()), &s).unwrap();
        assert!((0..2).all(|a| (0..2).all(|b| triv.angle(a, b).is_zero())));

        let whole = Subgroup::whole(g.clone());
        let chi = Character::new(whole.clone(), (0..4).map(|k| Angle::new(k, 4)).collect()).unwrap();
        let w = cocycle_from_section(&chi, &Section::smallest(&whole)).unwrap();
        assert_eq!(w.quotient_order(), 1);
        assert!(w.angle(0, 0).is_zero());
    }

    #[test]
    fn section_override() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let h = Subgroup::from_members(g, [0, 2]).unwrap();
        assert!(Section::with_representatives(&h, vec![0, 3]).is_ok());
        assert!(Section::with_representatives(&h, vec![2, 1]).is_err());
        assert!(Section::with_representatives(&h, vec![0, 2]).is_err());
    }

    #[test]
    fn character_from_generators() {
        let g = Arc::new(FiniteGroup::cyclic(6));
        let h = Subgroup::whole(g);
        let chi = Character::from_angle_map(h, &HashMap::from([(1, Angle::new(1, 6))])).unwrap();
        assert_eq!(chi.angle(3).unwrap(), Angle::new(1, 2));
    }

    #[test]
    fn angle_parsing() {
        assert_eq!("3/4".parse::<Angle>().unwrap(), Angle::new(-1, 4));
        assert_eq!("1".parse::<Angle>().unwrap(), Angle::zero());
        assert!("x/2".parse::<Angle>().is_err());
    }
}
