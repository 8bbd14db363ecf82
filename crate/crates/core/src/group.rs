//! Finite groups of affine isometries of a torus, their fixed-point sets and
//! singular loci, the hypothesis checks built on them, and `b_1`.

use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::intmat::{self, IntMatrix};
use crate::lattice::TorusLattice;
use crate::rational::frac;

pub const DEFAULT_ORDER_BOUND: usize = 10_000;

/// `x -> B x + b` in lattice coordinates, with `b` reduced mod 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineIsometry {
    pub linear: IntMatrix,
    pub translation: Vec<Rational64>,
    pub label: String,
}

impl fmt::Debug for AffineIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineIsometry({})", self.label)
    }
}

type Key = (Vec<i64>, Vec<Rational64>);

impl AffineIsometry {
    /// Validating constructor: finite order and determinant one.
    pub fn new(linear: IntMatrix, translation: Vec<Rational64>, label: &str) -> Result<Self> {
        let g = Self::unchecked(linear, translation, label);
        if !g.linear.is_square() || g.linear.nrows() != g.translation.len() {
            return Err(Error::ValidationError(format!("`{label}`: shape mismatch")));
        }
        if intmat::order(&g.linear, DEFAULT_ORDER_BOUND).is_none() {
            return Err(Error::NotFiniteOrder(label.to_string()));
        }
        let d = intmat::det(&g.linear);
        if d != 1 {
            return Err(Error::ValidationError(format!(
                "`{label}`: determinant of the linear part is {d}, expected 1"
            )));
        }
        Ok(g)
    }

    pub fn unchecked(linear: IntMatrix, translation: Vec<Rational64>, label: &str) -> Self {
        AffineIsometry {
            linear,
            translation: translation.into_iter().map(frac).collect(),
            label: label.to_string(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::unchecked(intmat::identity(n), vec![Rational64::zero(); n], "1")
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn is_identity(&self) -> bool {
        self.linear == intmat::identity(self.dim()) && self.translation.iter().all(Zero::is_zero)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &AffineIsometry) -> AffineIsometry {
        let t = mat_vec(&self.linear, &other.translation)
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect();
        AffineIsometry::unchecked(
            &self.linear * &other.linear,
            t,
            &compose_label(&self.label, &other.label),
        )
    }

    pub fn inverse(&self) -> AffineIsometry {
        let inv = intmat::unimodular_inverse(&self.linear).expect("unimodular linear part");
        let t = mat_vec(&inv, &self.translation).into_iter().map(|x| -x).collect();
        AffineIsometry::unchecked(inv, t, &format!("({})^-1", self.label))
    }

    pub fn apply(&self, x: &[Rational64]) -> Vec<Rational64> {
        mat_vec(&self.linear, x)
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// Equality of the underlying maps, ignoring labels.
    pub fn same_map(&self, other: &AffineIsometry) -> bool {
        self.linear == other.linear && self.translation == other.translation
    }

    fn key(&self) -> Key {
        (self.linear.iter().copied().collect(), self.translation.clone())
    }

    /// Order as an affine map.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return Some(k);
            }
            p = self.compose(&p);
        }
        None
    }

    pub fn trace(&self) -> i64 {
        self.linear.trace()
    }

    /// Multiplicity of the eigenvalue 1 of the linear part.
    pub fn eigenvalue_one_multiplicity(&self) -> usize {
        let n = self.dim();
        n - intmat::rank(&(&self.linear - intmat::identity(n)))
    }

    pub fn fixed_point_set(&self) -> Option<FixedSet> {
        fixed_point_set(self)
    }
}

fn compose_label(a: &str, b: &str) -> String {
    match (a, b) {
        ("1", x) | (x, "1") => x.to_string(),
        _ => format!("{a}{b}"),
    }
}

pub fn mat_vec(m: &IntMatrix, x: &[Rational64]) -> Vec<Rational64> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| x[j] * m[(i, j)])
                .fold(Rational64::zero(), |a, b| a + b)
        })
        .collect()
}

/// A connected component of a fixed-point set: `point + span_R(directions)` mod `Z^n`.
#[derive(Debug, Clone)]
pub struct FixedComponent {
    pub point: Vec<Rational64>,
    /// Saturated integer basis of the tangent directions, as columns.
    pub directions: IntMatrix,
}

impl FixedComponent {
    pub fn dim(&self) -> usize {
        self.directions.ncols()
    }

    fn same_span(&self, other: &FixedComponent) -> bool {
        self.dim() == other.dim() && contains_span(&self.directions, &other.directions)
    }

    /// Whether `self` contains `other` as subsets of the torus.
    pub fn contains(&self, other: &FixedComponent) -> bool {
        contains_span(&self.directions, &other.directions)
            && in_span_plus_lattice(&diff(&other.point, &self.point), &self.directions)
    }

    pub fn same_set(&self, other: &FixedComponent) -> bool {
        self.same_span(other) && self.contains(other)
    }

    pub fn intersects(&self, other: &FixedComponent) -> bool {
        let w = hcat(&self.directions, &other.directions);
        in_span_plus_lattice(&diff(&other.point, &self.point), &w)
    }

    pub fn image(&self, g: &AffineIsometry) -> FixedComponent {
        FixedComponent {
            point: g.apply(&self.point).into_iter().map(frac).collect(),
            directions: &g.linear * &self.directions,
        }
    }

    /// Whether `g` fixes every point of the component.
    pub fn fixed_pointwise_by(&self, g: &AffineIsometry) -> bool {
        let n = g.dim();
        let moved = &(&g.linear - intmat::identity(n)) * &self.directions;
        moved.iter().all(|&v| v == 0)
            && diff(&g.apply(&self.point), &self.point)
                .iter()
                .all(|x| x.is_integer())
    }

    /// Whether `g` (assumed to preserve the component) has a fixed point on it.
    pub fn has_fixed_point_of(&self, g: &AffineIsometry) -> bool {
        let n = g.dim();
        let w = &(&g.linear - intmat::identity(n)) * &self.directions;
        in_span_plus_lattice(&diff(&g.apply(&self.point), &self.point), &w)
    }

    /// Whether `g` (assumed to preserve the component) acts on it by a translation.
    pub fn acts_by_translation(&self, g: &AffineIsometry) -> bool {
        let n = g.dim();
        (&(&g.linear - intmat::identity(n)) * &self.directions)
            .iter()
            .all(|&v| v == 0)
    }
}

fn diff(a: &[Rational64], b: &[Rational64]) -> Vec<Rational64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn hcat(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.nrows();
    IntMatrix::from_fn(n, a.ncols() + b.ncols(), |i, j| {
        if j < a.ncols() {
            a[(i, j)]
        } else {
            b[(i, j - a.ncols())]
        }
    })
}

/// Whether `span_Q(b) ⊆ span_Q(a)`.
fn contains_span(a: &IntMatrix, b: &IntMatrix) -> bool {
    intmat::rank(a) == intmat::rank(&hcat(a, b))
}

/// Whether `delta ∈ span_R(w) + Z^n`: every integer covector killing `w`
/// must pair integrally with `delta`.
pub fn in_span_plus_lattice(delta: &[Rational64], w: &IntMatrix) -> bool {
    let n = delta.len();
    let annihilator = if w.ncols() == 0 {
        intmat::identity(n)
    } else {
        intmat::integer_kernel(&w.transpose())
    };
    annihilator.column_iter().all(|r| {
        r.iter()
            .zip(delta)
            .map(|(&ri, &d)| d * ri)
            .fold(Rational64::zero(), |a, b| a + b)
            .is_integer()
    })
}

/// The fixed-point set of an affine map: dimension, number of components and
/// a representative of each component.
#[derive(Debug, Clone)]
pub struct FixedSet {
    pub dimension: usize,
    pub component_count: usize,
    pub components: Vec<FixedComponent>,
}

pub fn fixed_point_set(g: &AffineIsometry) -> Option<FixedSet> {
    let n = g.dim();
    let m = &g.linear - intmat::identity(n);
    let s = intmat::smith(&m);
    let r = s.rank();
    // (B - I) x = -b  (mod Z^n)  becomes  D y = -P b  with  x = Q y.
    let pb = mat_vec(&s.left, &g.translation);
    if pb[r..].iter().any(|v| !v.is_integer()) {
        return None;
    }
    let directions = s.right.columns(r, n - r).into_owned();
    let mut components = Vec::new();
    let mut digits = vec![0i64; r];
    loop {
        let mut y = vec![Rational64::zero(); n];
        for i in 0..r {
            y[i] = (-pb[i] + digits[i]) / s.divisors[i];
        }
        let x: Vec<Rational64> = mat_vec(&s.right, &y).into_iter().map(frac).collect();
        components.push(FixedComponent {
            point: x,
            directions: directions.clone(),
        });
        let mut i = 0;
        while i < r {
            digits[i] += 1;
            if digits[i] < s.divisors[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == r {
            break;
        }
    }
    Some(FixedSet {
        dimension: n - r,
        component_count: components.len(),
        components,
    })
}

/// A finite group of affine isometries, as the full list of its elements.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub lattice: TorusLattice,
    pub elements: Vec<AffineIsometry>,
    pub generators: Vec<usize>,
    index: HashMap<Key, usize>,
}

impl GroupAction {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &AffineIsometry) -> Option<usize> {
        self.index.get(&g.key()).copied()
    }

    pub fn contains(&self, g: &AffineIsometry) -> bool {
        self.index_of(g).is_some()
    }

    pub fn dim(&self) -> usize {
        self.lattice.rank
    }
}

/// Closure of the generators under composition.
pub fn generate_group(
    lattice: &TorusLattice,
    generators: &[AffineIsometry],
    order_bound: usize,
) -> Result<GroupAction> {
    let n = lattice.rank;
    for g in generators {
        if g.dim() != n {
            return Err(Error::ValidationError(format!(
                "`{}` acts on dimension {}, lattice has rank {n}",
                g.label,
                g.dim()
            )));
        }
        if intmat::order(&g.linear, DEFAULT_ORDER_BOUND).is_none() {
            return Err(Error::NotFiniteOrder(g.label.clone()));
        }
    }
    let mut elements = vec![AffineIsometry::identity(n)];
    let mut index: HashMap<Key, usize> = HashMap::new();
    index.insert(elements[0].key(), 0);
    let mut gen_idx = Vec::new();
    for g in generators {
        let e = g.clone();
        let k = e.key();
        if let Some(&i) = index.get(&k) {
            gen_idx.push(i);
        } else {
            index.insert(k, elements.len());
            gen_idx.push(elements.len());
            elements.push(e);
        }
    }
    let mut frontier = 0;
    while frontier < elements.len() {
        let h = elements[frontier].clone();
        for g in generators {
            let p = g.compose(&h);
            let k = p.key();
            if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(k) {
                if elements.len() >= order_bound {
                    return Err(Error::OrderExceeded(order_bound));
                }
                slot.insert(elements.len());
                elements.push(p);
            }
        }
        frontier += 1;
    }
    Ok(GroupAction {
        lattice: lattice.clone(),
        elements,
        generators: gen_idx,
        index,
    })
}

/// `b_1` of the quotient: the average trace of the linear parts.
pub fn betti_one(group: &GroupAction) -> Result<i64> {
    let total: i64 = group.elements.iter().map(AffineIsometry::trace).sum();
    let order = group.order() as i64;
    if total % order != 0 {
        return Err(Error::NonIntegralAverage(format!("{total}/{order}")));
    }
    Ok(total / order)
}

/// One Γ-orbit of maximal fixed tori.
#[derive(Debug, Clone)]
pub struct SingularComponent {
    pub representative: FixedComponent,
    pub representative_fix_dim: usize,
    /// `|A_i|`: elements fixing the component pointwise.
    pub centralizer_order: usize,
    /// `|B_i| = |N(F_i)| / |A_i|`.
    pub normalizer_quotient_order: usize,
    pub orbit_size: usize,
    pub transversal_group_tag: String,
    pub intersects_other_component: bool,
    /// Condition (ii): `B_i` acts freely on `F_i`.
    pub quotient_acts_freely: bool,
    /// `B_i` acts on `F_i` by translations, so `F_i / B_i` is again a torus.
    pub quotient_acts_by_translations: bool,
}

pub fn singular_locus(group: &GroupAction) -> Vec<SingularComponent> {
    let mut all: Vec<FixedComponent> = Vec::new();
    for g in group.elements.iter().filter(|g| !g.is_identity()) {
        if let Some(fs) = fixed_point_set(g) {
            for c in fs.components {
                if !all.iter().any(|d| d.same_set(&c)) {
                    all.push(c);
                }
            }
        }
    }
    let maximal: Vec<FixedComponent> = all
        .iter()
        .filter(|c| !all.iter().any(|d| d.dim() > c.dim() && d.contains(c)))
        .cloned()
        .collect();

    let mut assigned = vec![false; maximal.len()];
    let mut out = Vec::new();
    for i in 0..maximal.len() {
        if assigned[i] {
            continue;
        }
        let f = &maximal[i];
        let mut orbit = Vec::new();
        for g in &group.elements {
            let img = f.image(g);
            if let Some(j) = maximal.iter().position(|d| d.same_set(&img)) {
                if !orbit.contains(&j) {
                    orbit.push(j);
                }
            }
        }
        for &j in &orbit {
            assigned[j] = true;
        }
        let normalizer: Vec<&AffineIsometry> = group
            .elements
            .iter()
            .filter(|g| f.same_set(&f.image(g)))
            .collect();
        let centralizer: Vec<&AffineIsometry> = normalizer
            .iter()
            .copied()
            .filter(|g| f.fixed_pointwise_by(g))
            .collect();
        let outside: Vec<&AffineIsometry> = normalizer
            .iter()
            .copied()
            .filter(|g| !f.fixed_pointwise_by(g))
            .collect();
        let intersects = maximal
            .iter()
            .enumerate()
            .any(|(j, d)| j != i && f.intersects(d));
        out.push(SingularComponent {
            representative: f.clone(),
            representative_fix_dim: f.dim(),
            centralizer_order: centralizer.len(),
            normalizer_quotient_order: normalizer.len() / centralizer.len(),
            orbit_size: orbit.len(),
            transversal_group_tag: transversal_tag(&centralizer),
            intersects_other_component: intersects,
            quotient_acts_freely: outside.iter().all(|g| !f.has_fixed_point_of(g)),
            quotient_acts_by_translations: outside.iter().all(|g| f.acts_by_translation(g)),
        });
    }
    out
}

fn transversal_tag(centralizer: &[&AffineIsometry]) -> String {
    let n = centralizer.len();
    let cyclic = centralizer
        .iter()
        .any(|g| g.order(n) == Some(n));
    if cyclic {
        format!("Z/{n}")
    } else {
        format!("order {n}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HypothesisLevel {
    Unknown,
    Hyp2,
    Hyp2Spin,
    Situation1,
    Hyp1,
}

impl HypothesisLevel {
    pub fn name(self) -> &'static str {
        match self {
            HypothesisLevel::Hyp1 => "HYP1",
            HypothesisLevel::Hyp2Spin => "HYP2_SPIN",
            HypothesisLevel::Hyp2 => "HYP2",
            HypothesisLevel::Situation1 => "SITUATION1",
            HypothesisLevel::Unknown => "UNKNOWN",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            HypothesisLevel::Hyp1,
            HypothesisLevel::Hyp2Spin,
            HypothesisLevel::Hyp2,
            HypothesisLevel::Situation1,
            HypothesisLevel::Unknown,
        ]
        .into_iter()
        .find(|l| l.name() == s)
    }

    /// Whether the mod-48 formula is licensed.
    pub fn licenses_mod48(self) -> bool {
        matches!(self, HypothesisLevel::Hyp1 | HypothesisLevel::Situation1)
    }

    /// Whether the mod-24 formula is licensed.
    pub fn licenses_mod24(self) -> bool {
        matches!(
            self,
            HypothesisLevel::Hyp1 | HypothesisLevel::Situation1 | HypothesisLevel::Hyp2Spin
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Resolution data that the orbifold alone does not determine.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResolutionMetadata {
    pub ell_parity: Option<Parity>,
    /// The orientation-reversing isometries used for condition (iii) are spin.
    pub spin_isometries: bool,
    /// Every component carries an orientation-reversing isometry extending to
    /// its neighbourhood, beyond the coded sufficient conditions.
    pub component_reflections: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisVerdict {
    pub level: HypothesisLevel,
    pub witness_notes: Vec<String>,
}

pub fn check_hypothesis(
    locus: &[SingularComponent],
    metadata: Option<&ResolutionMetadata>,
) -> HypothesisVerdict {
    let mut notes = Vec::new();
    let unknown = |mut notes: Vec<String>, why: String| {
        notes.push(why);
        HypothesisVerdict {
            level: HypothesisLevel::Unknown,
            witness_notes: notes,
        }
    };
    if let Some(c) = locus.iter().find(|c| ![1, 3].contains(&c.representative_fix_dim)) {
        return unknown(notes, format!("fixed component of dimension {}", c.representative_fix_dim));
    }
    if locus.iter().any(|c| c.intersects_other_component) {
        return unknown(notes, "condition (i) fails: fixed tori intersect".into());
    }
    notes.push(format!("condition (i): {} disjoint component orbit(s)", locus.len()));
    if locus.iter().any(|c| !c.quotient_acts_freely) {
        return unknown(notes, "condition (ii) fails: B_i has fixed points on F_i".into());
    }
    notes.push("condition (ii): every B_i acts freely".into());

    let torus_like = |c: &SingularComponent| {
        c.representative_fix_dim == 3
            && (c.normalizer_quotient_order == 1 || c.quotient_acts_by_translations)
    };
    if locus.iter().all(torus_like) {
        notes.push("every component is T^3 x C^2/G with T^3 = F_i/B_i".into());
        return HypothesisVerdict {
            level: HypothesisLevel::Hyp1,
            witness_notes: notes,
        };
    }

    let meta = metadata.cloned().unwrap_or_default();
    for c in locus {
        let ok = c.normalizer_quotient_order == 1
            || (c.normalizer_quotient_order == 2 && c.representative_fix_dim == 1)
            || meta.component_reflections;
        if !ok {
            return unknown(
                notes,
                format!(
                    "condition (iii) not certified for a {}-torus with |B| = {}",
                    c.representative_fix_dim, c.normalizer_quotient_order
                ),
            );
        }
    }
    notes.push("condition (iii): orientation-reversing isometry on each component".into());
    if !meta.spin_isometries {
        return HypothesisVerdict {
            level: HypothesisLevel::Hyp2,
            witness_notes: notes,
        };
    }
    notes.push("isometries are spin (resolution metadata)".into());
    let twisted = locus
        .iter()
        .filter(|c| c.normalizer_quotient_order > 1 && !c.quotient_acts_by_translations)
        .count();
    if twisted == 0 || meta.ell_parity == Some(Parity::Even) {
        notes.push(if twisted == 0 {
            "no twisted components: Situation 1 holds".into()
        } else {
            format!("{twisted} twisted component orbit(s), ell even: Situation 1 holds")
        });
        return HypothesisVerdict {
            level: HypothesisLevel::Situation1,
            witness_notes: notes,
        };
    }
    HypothesisVerdict {
        level: HypothesisLevel::Hyp2Spin,
        witness_notes: notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::r;
    use nalgebra::DVector;

    fn diag(d: &[i64]) -> IntMatrix {
        IntMatrix::from_diagonal(&DVector::from_vec(d.to_vec()))
    }

    fn t(v: &[(i64, i64)]) -> Vec<Rational64> {
        v.iter().map(|&(p, q)| r(p, q)).collect()
    }

    #[test]
    fn identity_fixes_everything() {
        let fs = fixed_point_set(&AffineIsometry::identity(7)).unwrap();
        assert_eq!((fs.dimension, fs.component_count), (7, 1));
    }

    #[test]
    fn involution_fixes_sixteen_three_tori() {
        let a = AffineIsometry::new(diag(&[-1, -1, -1, -1, 1, 1, 1]), vec![r(0, 1); 7], "a").unwrap();
        let fs = fixed_point_set(&a).unwrap();
        assert_eq!((fs.dimension, fs.component_count), (3, 16));
    }

    #[test]
    fn half_translation_along_fixed_axis_is_free() {
        let mut tr = vec![(0, 1); 7];
        tr[6] = (1, 2);
        let a = AffineIsometry::new(diag(&[-1, -1, -1, -1, 1, 1, 1]), t(&tr), "a").unwrap();
        assert!(fixed_point_set(&a).is_none());
    }

    #[test]
    fn determinant_minus_one_is_rejected() {
        let e = AffineIsometry::new(diag(&[-1, 1, 1, 1, 1, 1, 1]), vec![r(0, 1); 7], "x");
        assert!(matches!(e, Err(Error::ValidationError(_))));
    }

    #[test]
    fn trivial_group() {
        let g = generate_group(&TorusLattice::standard(7), &[], 10).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(betti_one(&g).unwrap(), 7);
        assert!(singular_locus(&g).is_empty());
    }

    #[test]
    fn order_bound_is_enforced() {
        let mut tr = vec![(0, 1); 7];
        tr[0] = (1, 5);
        let g = AffineIsometry::new(intmat::identity(7), t(&tr), "s").unwrap();
        assert_eq!(
            generate_group(&TorusLattice::standard(7), &[g], 3).unwrap_err(),
            Error::OrderExceeded(3)
        );
    }
}
