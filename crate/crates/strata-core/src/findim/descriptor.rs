//! Fiber descriptors: finite symbolic presentations of algebras over a base
//! variety, together with exact fiber construction at ℚ(i)-points.
//!
//! A descriptor never stores a fiber; `build_fiber` evaluates the defining
//! data at a point — coefficient functions at the point's coordinates, ideal
//! entries to their image in the residue field, crossed products over the
//! full group orbit — and returns a validated [`FinDimAlgebra`] whose basis
//! carries stable string labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exact::GaussianRational;
use crate::findim::{FinDimAlgebra, FinDimError, MarkedCentral, MAX_DIM};
use crate::groups::{rho_matrices, verify_cocycle, Cocycle2, CocycleJson, CocycleVerdict, FiniteGroupTable};
use crate::lattice::{ActionJson, LatticeAction, LatticeError};

type Gq = GaussianRational;

/// The base variety a descriptor's coefficients live over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseJson {
    /// The affine line; points are single ℚ(i) values.
    AffineLine,
    /// A split torus; points are tuples of nonzero ℚ(i) values.
    Torus { rank: usize },
}

impl BaseJson {
    fn dim(&self) -> usize {
        match self {
            BaseJson::AffineLine => 1,
            BaseJson::Torus { rank } => *rank,
        }
    }

    fn check_point(&self, point: &[Gq]) -> Result<(), FinDimError> {
        if point.len() != self.dim() {
            return Err(FinDimError::PointOffBase(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                point.len()
            )));
        }
        if matches!(self, BaseJson::Torus { .. }) && point.iter().any(Gq::is_zero) {
            return Err(FinDimError::PointOffBase(
                "torus points must have nonzero coordinates".into(),
            ));
        }
        Ok(())
    }
}

/// One entry of a matrix-ideal pattern: the full coordinate ring, or the
/// ideal of functions vanishing on the chosen subvariety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Full,
    Ideal,
}

/// Coefficient block of a crossed-product descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientKind {
    #[serde(rename = "scalar")]
    Scalar,
    /// 2×2 matrices with the Klein four-group acting by conjugation through
    /// the built-in projective representation.
    #[serde(rename = "M2-rho")]
    M2Rho,
}

/// A named central element given by coordinate strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedJson {
    pub name: String,
    pub coords: Vec<String>,
}

/// A symbolic family of algebras over a base, with exact fibers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberDescriptor {
    /// A single fixed algebra (the base is a point).
    StructureConstants {
        dim: usize,
        /// Dense table: table[i][j][k] = coefficient of e_k in e_i·e_j.
        table: Vec<Vec<Vec<String>>>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        unit: Option<Vec<String>>,
        #[serde(default)]
        marked: Vec<MarkedJson>,
    },
    /// (O(T) ⊗ coefficient) ⋊ Γ for a lattice action of Γ on T, optionally
    /// twisted by a 2-cocycle.
    CrossedProduct {
        action: ActionJson,
        coefficient: CoefficientKind,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        cocycle: Option<CocycleJson>,
    },
    /// Same data with the cocycle mandatory.
    TwistedCrossedProduct {
        action: ActionJson,
        coefficient: CoefficientKind,
        cocycle: CocycleJson,
    },
    /// 2×2 matrices over O(base) with per-entry ideal constraints.
    MatrixIdealPattern {
        base: BaseJson,
        /// The points of the vanishing subvariety Y (finite).
        vanishing: Vec<Vec<String>>,
        pattern: Vec<Vec<EntryKind>>,
    },
    /// O(base)/I_Y for a finite point set Y.
    QuotientRing { base: BaseJson, vanishing: Vec<Vec<String>> },
    /// The full coordinate ring O(base); every fiber is the residue field.
    CoordinateRing { base: BaseJson },
    /// Finite direct sum of descriptors over one shared base.
    DirectSum { summands: Vec<FiberDescriptor> },
}

pub(crate) fn parse_gq(s: &str) -> Result<Gq, FinDimError> {
    s.parse::<Gq>().map_err(|e| FinDimError::Parse(format!("bad ℚ(i) literal {s:?}: {e}")))
}

pub(crate) fn parse_points(
    raw: &[Vec<String>],
    base: &BaseJson,
) -> Result<Vec<Vec<Gq>>, FinDimError> {
    raw.iter()
        .map(|coords| {
            let p: Vec<Gq> =
                coords.iter().map(|c| parse_gq(c)).collect::<Result<_, _>>()?;
            base.check_point(&p).map_err(|_| {
                FinDimError::Validation(format!("vanishing point {coords:?} is off the base"))
            })?;
            Ok(p)
        })
        .collect()
}

fn lattice_err(err: LatticeError) -> FinDimError {
    match err {
        LatticeError::Parse(msg) => FinDimError::Parse(msg),
        other => FinDimError::Validation(other.to_string()),
    }
}

/// Multiplication and Γ-action data of a coefficient block.
struct Coefficient {
    dim: usize,
    /// mul[m][m'] = expansion of E_m·E_{m'}.
    mul: Vec<Vec<Vec<(usize, Gq)>>>,
    /// alpha[g][m] = expansion of α_g(E_m).
    alpha: Vec<Vec<Vec<(usize, Gq)>>>,
    /// Coordinates of the coefficient unit.
    unit: Vec<(usize, Gq)>,
}

impl Coefficient {
    fn scalar(group_order: usize) -> Self {
        Coefficient {
            dim: 1,
            mul: vec![vec![vec![(0, Gq::one())]]],
            alpha: vec![vec![vec![(0, Gq::one())]]; group_order],
            unit: vec![(0, Gq::one())],
        }
    }

    /// M₂ with the Klein four-group acting by Ad of the built-in projective
    /// representation; basis E_{rc} at index 2r + c.
    fn m2_rho(group: &FiniteGroupTable) -> Result<Self, FinDimError> {
        if *group != FiniteGroupTable::klein_v4() {
            return Err(FinDimError::Validation(
                "the M2-rho coefficient requires the Klein four-group table".into(),
            ));
        }
        let rho = rho_matrices();
        let idx = |r: usize, c: usize| 2 * r + c;
        let mut mul = vec![vec![Vec::new(); 4]; 4];
        for r in 0..2 {
            for m in 0..2 {
                for c in 0..2 {
                    mul[idx(r, m)][idx(m, c)] = vec![(idx(r, c), Gq::one())];
                }
            }
        }
        let mut alpha = Vec::with_capacity(4);
        for g in 0..4 {
            let p = &rho[g];
            let det = &(p.at(0, 0) * p.at(1, 1)) - &(p.at(0, 1) * p.at(1, 0));
            let dinv = det.inv().expect("representation matrices are invertible");
            // p⁻¹ = adj(p)/det.
            let pinv = [
                [p.at(1, 1) * &dinv, &(-p.at(0, 1)) * &dinv],
                [&(-p.at(1, 0)) * &dinv, p.at(0, 0) * &dinv],
            ];
            let mut per_basis = Vec::with_capacity(4);
            for r in 0..2 {
                for c in 0..2 {
                    // (p·E_{rc}·p⁻¹)[u][v] = p[u][r]·p⁻¹[c][v]
                    let mut terms = Vec::new();
                    for u in 0..2 {
                        for v in 0..2 {
                            let coeff = &*p.at(u, r) * &pinv[c][v];
                            if !coeff.is_zero() {
                                terms.push((idx(u, v), coeff));
                            }
                        }
                    }
                    per_basis.push(terms);
                }
            }
            alpha.push(per_basis);
        }
        Ok(Coefficient {
            dim: 4,
            mul,
            alpha,
            unit: vec![(idx(0, 0), Gq::one()), (idx(1, 1), Gq::one())],
        })
    }
}

impl FiberDescriptor {
    /// Number of coordinates a fiber point must have.
    pub fn base_dim(&self) -> Result<usize, FinDimError> {
        match self {
            FiberDescriptor::StructureConstants { .. } => Ok(0),
            FiberDescriptor::CrossedProduct { action, .. }
            | FiberDescriptor::TwistedCrossedProduct { action, .. } => Ok(action.rank),
            FiberDescriptor::MatrixIdealPattern { base, .. }
            | FiberDescriptor::QuotientRing { base, .. }
            | FiberDescriptor::CoordinateRing { base } => Ok(base.dim()),
            FiberDescriptor::DirectSum { summands } => {
                let first = summands
                    .first()
                    .ok_or_else(|| FinDimError::Validation("empty direct sum".into()))?;
                first.base_dim()
            }
        }
    }

    /// Structural validation without picking a point.
    pub fn validate(&self) -> Result<(), FinDimError> {
        match self {
            FiberDescriptor::StructureConstants { dim, table, unit, marked } => {
                if *dim > MAX_DIM {
                    return Err(FinDimError::OrbitTooLarge { dim: *dim, max: MAX_DIM });
                }
                if table.len() != *dim
                    || table.iter().any(|row| {
                        row.len() != *dim || row.iter().any(|entry| entry.len() != *dim)
                    })
                {
                    return Err(FinDimError::Validation(
                        "structure-constant table is not dim×dim×dim".into(),
                    ));
                }
                if let Some(u) = unit {
                    if u.len() != *dim {
                        return Err(FinDimError::Validation("unit has wrong length".into()));
                    }
                }
                for m in marked {
                    if m.coords.len() != *dim {
                        return Err(FinDimError::Validation(format!(
                            "marked element {} has wrong length",
                            m.name
                        )));
                    }
                }
                // Full table validation happens on fiber construction.
                build_fiber(self, &[]).map(|_| ())
            }
            FiberDescriptor::CrossedProduct { action, coefficient, cocycle } => {
                validate_crossed(action, *coefficient, cocycle.as_ref())
            }
            FiberDescriptor::TwistedCrossedProduct { action, coefficient, cocycle } => {
                validate_crossed(action, *coefficient, Some(cocycle))
            }
            FiberDescriptor::MatrixIdealPattern { base, vanishing, pattern } => {
                parse_points(vanishing, base)?;
                if pattern.len() != 2 || pattern.iter().any(|row| row.len() != 2) {
                    return Err(FinDimError::Validation(
                        "matrix-ideal patterns must be 2×2".into(),
                    ));
                }
                Ok(())
            }
            FiberDescriptor::QuotientRing { base, vanishing } => {
                parse_points(vanishing, base)?;
                Ok(())
            }
            FiberDescriptor::CoordinateRing { .. } => Ok(()),
            FiberDescriptor::DirectSum { summands } => {
                if summands.is_empty() {
                    return Err(FinDimError::Validation("empty direct sum".into()));
                }
                let dim = summands[0].base_dim()?;
                for s in summands {
                    s.validate()?;
                    if s.base_dim()? != dim {
                        return Err(FinDimError::Validation(
                            "direct summands live over different bases".into(),
                        ));
                    }
                    if matches!(
                        s,
                        FiberDescriptor::CrossedProduct { .. }
                            | FiberDescriptor::TwistedCrossedProduct { .. }
                            | FiberDescriptor::DirectSum { .. }
                    ) {
                        return Err(FinDimError::UnsupportedDescriptor(
                            "direct sums take pattern, quotient-ring, or fixed-algebra summands"
                                .into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }
}

fn validate_crossed(
    action: &ActionJson,
    coefficient: CoefficientKind,
    cocycle: Option<&CocycleJson>,
) -> Result<(), FinDimError> {
    let action = LatticeAction::from_json(action).map_err(lattice_err)?;
    if let Some(cj) = cocycle {
        let (group, nat) =
            Cocycle2::from_json(cj).map_err(|e| FinDimError::Validation(e.to_string()))?;
        if group != *action.group() {
            return Err(FinDimError::Validation(
                "cocycle group table differs from the action's group".into(),
            ));
        }
        if verify_cocycle(&group, &nat) != CocycleVerdict::Valid {
            return Err(FinDimError::Validation("cocycle identity fails".into()));
        }
    }
    match coefficient {
        CoefficientKind::Scalar => Ok(()),
        CoefficientKind::M2Rho => Coefficient::m2_rho(action.group()).map(|_| ()),
    }
}

/// Builds the fiber of the descriptor at the given point.
pub fn build_fiber(
    desc: &FiberDescriptor,
    point: &[Gq],
) -> Result<FinDimAlgebra, FinDimError> {
    Ok(build_fiber_labeled(desc, point)?.0)
}

/// Builds the fiber together with stable basis labels (one per basis
/// element, identical across points wherever the element survives).
pub fn build_fiber_labeled(
    desc: &FiberDescriptor,
    point: &[Gq],
) -> Result<(FinDimAlgebra, Vec<String>), FinDimError> {
    match desc {
        FiberDescriptor::StructureConstants { dim, table, unit, marked } => {
            if !point.is_empty() {
                return Err(FinDimError::PointOffBase(
                    "a fixed algebra has no base coordinates".into(),
                ));
            }
            let mut sparse = BTreeMap::new();
            for (i, row) in table.iter().enumerate() {
                if row.len() != *dim {
                    return Err(FinDimError::Validation(
                        "structure-constant table is not dim×dim×dim".into(),
                    ));
                }
                for (j, entry) in row.iter().enumerate() {
                    if entry.len() != *dim {
                        return Err(FinDimError::Validation(
                            "structure-constant table is not dim×dim×dim".into(),
                        ));
                    }
                    let terms: Vec<(usize, Gq)> = entry
                        .iter()
                        .enumerate()
                        .map(|(k, c)| Ok((k, parse_gq(c)?)))
                        .collect::<Result<Vec<_>, FinDimError>>()?
                        .into_iter()
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    if !terms.is_empty() {
                        sparse.insert((i, j), terms);
                    }
                }
            }
            if table.len() != *dim {
                return Err(FinDimError::Validation(
                    "structure-constant table is not dim×dim×dim".into(),
                ));
            }
            let unit = unit
                .as_ref()
                .map(|u| u.iter().map(|c| parse_gq(c)).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let marked = marked
                .iter()
                .map(|m| {
                    Ok(MarkedCentral {
                        name: m.name.clone(),
                        coords: m
                            .coords
                            .iter()
                            .map(|c| parse_gq(c))
                            .collect::<Result<Vec<_>, FinDimError>>()?,
                    })
                })
                .collect::<Result<Vec<_>, FinDimError>>()?;
            let alg = FinDimAlgebra::new(*dim, sparse, unit, marked)?;
            let labels = (0..*dim).map(|i| format!("b{i}")).collect();
            Ok((alg, labels))
        }
        FiberDescriptor::CrossedProduct { action, coefficient, cocycle } => {
            build_crossed_fiber(action, *coefficient, cocycle.as_ref(), point)
        }
        FiberDescriptor::TwistedCrossedProduct { action, coefficient, cocycle } => {
            build_crossed_fiber(action, *coefficient, Some(cocycle), point)
        }
        FiberDescriptor::MatrixIdealPattern { base, vanishing, pattern } => {
            build_pattern_fiber(base, vanishing, pattern, point)
        }
        FiberDescriptor::QuotientRing { base, vanishing } => {
            build_quotient_fiber(base, vanishing, point)
        }
        FiberDescriptor::CoordinateRing { base } => {
            base.check_point(point)?;
            let unit = vec![Gq::one()];
            let marked = coordinate_marked(base, point, &unit);
            let mut table = BTreeMap::new();
            table.insert((0, 0), vec![(0, Gq::one())]);
            let alg = FinDimAlgebra::new(1, table, Some(unit), marked)?;
            Ok((alg, vec!["u".into()]))
        }
        FiberDescriptor::DirectSum { summands } => {
            desc.validate()?;
            let mut acc: Option<(FinDimAlgebra, Vec<String>)> = None;
            for (idx, s) in summands.iter().enumerate() {
                let (alg, labels) = build_fiber_labeled(s, point)?;
                let labels: Vec<String> =
                    labels.into_iter().map(|l| format!("s{idx}.{l}")).collect();
                acc = Some(match acc {
                    None => (alg, labels),
                    Some((sum, mut acc_labels)) => {
                        acc_labels.extend(labels);
                        (sum.direct_sum(&alg)?, acc_labels)
                    }
                });
            }
            Ok(acc.expect("validated nonempty"))
        }
    }
}

fn build_crossed_fiber(
    action_json: &ActionJson,
    coefficient: CoefficientKind,
    cocycle: Option<&CocycleJson>,
    point: &[Gq],
) -> Result<(FinDimAlgebra, Vec<String>), FinDimError> {
    let action = LatticeAction::from_json(action_json).map_err(lattice_err)?;
    let group = action.group().clone();
    let order = group.order();
    let nat = match cocycle {
        None => Cocycle2::trivial(order),
        Some(cj) => {
            let (cg, nat) =
                Cocycle2::from_json(cj).map_err(|e| FinDimError::Validation(e.to_string()))?;
            if cg != group {
                return Err(FinDimError::Validation(
                    "cocycle group table differs from the action's group".into(),
                ));
            }
            if verify_cocycle(&group, &nat) != CocycleVerdict::Valid {
                return Err(FinDimError::Validation("cocycle identity fails".into()));
            }
            nat
        }
    };
    if !action.is_on_torus(point) {
        return Err(FinDimError::PointOffBase(format!(
            "{} is not on the rank-{} torus",
            format_point(point),
            action.rank()
        )));
    }

    // The Γ-orbit of the point, in first-seen order.
    let mut orbit: Vec<Vec<Gq>> = Vec::new();
    for g in 0..order {
        let image = action.point_action(g, point);
        if !orbit.contains(&image) {
            orbit.push(image);
        }
    }
    let orbit_index = |p: &[Gq]| orbit.iter().position(|q| q == p).expect("orbit is closed");

    let coeff = match coefficient {
        CoefficientKind::Scalar => Coefficient::scalar(order),
        CoefficientKind::M2Rho => Coefficient::m2_rho(&group)?,
    };
    let dim = orbit.len() * coeff.dim * order;
    if dim > MAX_DIM {
        return Err(FinDimError::OrbitTooLarge { dim, max: MAX_DIM });
    }
    let idx = |a: usize, m: usize, g: usize| (a * coeff.dim + m) * order + g;

    // (δ_a E u_g)(δ_b F u_h) = [a = g·b] ♮(g,h) δ_a (E·α_g(F)) u_{gh}
    let mut table = BTreeMap::new();
    for b in 0..orbit.len() {
        for g in 0..order {
            let a = orbit_index(&action.point_action(g, &orbit[b]));
            for h in 0..order {
                let gh = group.mul(g, h);
                let tw = nat.value(g, h).clone();
                for m in 0..coeff.dim {
                    for mp in 0..coeff.dim {
                        let mut terms: Vec<(usize, Gq)> = Vec::new();
                        for (mid, c1) in &coeff.alpha[g][mp] {
                            for (k, c2) in &coeff.mul[m][*mid] {
                                let c = &(&tw * c1) * c2;
                                if !c.is_zero() {
                                    terms.push((idx(a, *k, gh), c));
                                }
                            }
                        }
                        if !terms.is_empty() {
                            table.insert((idx(a, m, g), idx(b, mp, h)), terms);
                        }
                    }
                }
            }
        }
    }

    let mut unit = vec![Gq::zero(); dim];
    for a in 0..orbit.len() {
        for (m, c) in &coeff.unit {
            unit[idx(a, *m, 0)] = c.clone();
        }
    }

    // One marked central element per coordinate: the Γ-orbit sum of the
    // coordinate character, evaluated over the fiber's orbit.
    let mut marked = Vec::new();
    for i in 0..action.rank() {
        let mut coords = vec![Gq::zero(); dim];
        for (a, p) in orbit.iter().enumerate() {
            let mut value = Gq::zero();
            for g in 0..order {
                let mat = action.matrix(g);
                let mut term = Gq::one();
                for (j, t) in p.iter().enumerate() {
                    let e = mat[j][i];
                    if e != 0 {
                        term = &term * &t.pow(e).expect("torus coordinates are nonzero");
                    }
                }
                value = &value + &term;
            }
            for (m, c) in &coeff.unit {
                coords[idx(a, *m, 0)] = &value * c;
            }
        }
        marked.push(MarkedCentral { name: format!("sym_{i}"), coords });
    }

    let alg = FinDimAlgebra::new(dim, table, Some(unit), marked)?;
    let mut labels = Vec::with_capacity(dim);
    for a in 0..orbit.len() {
        for m in 0..coeff.dim {
            for g in 0..order {
                labels.push(format!("p{a}.m{m}.g{g}"));
            }
        }
    }
    debug_assert!(labels.len() == dim);
    // Reorder labels to the index layout (a, m, g) — already matches idx.
    Ok((alg, labels))
}

fn format_point(point: &[Gq]) -> String {
    let coords: Vec<String> = point.iter().map(|c| c.to_string()).collect();
    format!("({})", coords.join(", "))
}

fn build_pattern_fiber(
    base: &BaseJson,
    vanishing: &[Vec<String>],
    pattern: &[Vec<EntryKind>],
    point: &[Gq],
) -> Result<(FinDimAlgebra, Vec<String>), FinDimError> {
    if pattern.len() != 2 || pattern.iter().any(|row| row.len() != 2) {
        return Err(FinDimError::Validation("matrix-ideal patterns must be 2×2".into()));
    }
    let y = parse_points(vanishing, base)?;
    base.check_point(point)?;
    let on_y = y.iter().any(|q| q == point);

    // Entries surviving evaluation at the point.
    let mut present: Vec<(usize, usize)> = Vec::new();
    for (r, row) in pattern.iter().enumerate() {
        for (c, entry) in row.iter().enumerate() {
            let alive = match entry {
                EntryKind::Full => true,
                EntryKind::Ideal => !on_y,
            };
            if alive {
                present.push((r, c));
            }
        }
    }
    let pos = |r: usize, c: usize| present.iter().position(|&(pr, pc)| (pr, pc) == (r, c));

    let mut table = BTreeMap::new();
    for (i, &(r, c)) in present.iter().enumerate() {
        for (j, &(cp, d)) in present.iter().enumerate() {
            if c != cp {
                continue;
            }
            let Some(k) = pos(r, d) else {
                return Err(FinDimError::Validation(format!(
                    "pattern fiber is not closed: entry ({},{}) missing from the product",
                    r + 1,
                    d + 1
                )));
            };
            table.insert((i, j), vec![(k, Gq::one())]);
        }
    }

    // Unit = sum of the present diagonal entries, when that is a two-sided
    // unit for every present entry.
    let unital = present
        .iter()
        .all(|&(r, c)| pos(r, r).is_some() && pos(c, c).is_some());
    let unit = unital.then(|| {
        let mut u = vec![Gq::zero(); present.len()];
        for (i, &(r, c)) in present.iter().enumerate() {
            if r == c {
                u[i] = Gq::one();
            }
        }
        u
    });

    // The base coordinates act by scalar matrices.
    let marked = match &unit {
        Some(u) => coordinate_marked(base, point, u),
        None => Vec::new(),
    };

    let alg = FinDimAlgebra::new(present.len(), table, unit, marked)?;
    let labels =
        present.iter().map(|&(r, c)| format!("e_{}{}", r + 1, c + 1)).collect();
    Ok((alg, labels))
}

/// Marked elements "x" (or "x0", "x1", … for higher-rank bases): the base
/// coordinates acting through the fiber's unit.
fn coordinate_marked(base: &BaseJson, point: &[Gq], unit: &[Gq]) -> Vec<MarkedCentral> {
    let names: Vec<String> = if base.dim() == 1 {
        vec!["x".into()]
    } else {
        (0..base.dim()).map(|i| format!("x{i}")).collect()
    };
    names
        .into_iter()
        .zip(point)
        .map(|(name, value)| MarkedCentral {
            name,
            coords: unit.iter().map(|u| u * value).collect(),
        })
        .collect()
}

fn build_quotient_fiber(
    base: &BaseJson,
    vanishing: &[Vec<String>],
    point: &[Gq],
) -> Result<(FinDimAlgebra, Vec<String>), FinDimError> {
    let y = parse_points(vanishing, base)?;
    base.check_point(point)?;
    if y.iter().any(|q| q == point) {
        // Residue field ℂ at a point of Y.
        let unit = vec![Gq::one()];
        let marked = coordinate_marked(base, point, &unit);
        let mut table = BTreeMap::new();
        table.insert((0, 0), vec![(0, Gq::one())]);
        let alg = FinDimAlgebra::new(1, table, Some(unit), marked)?;
        Ok((alg, vec!["u".into()]))
    } else {
        // The fiber vanishes off Y: the zero algebra, with the marked
        // coordinate names kept (empty coordinates) so direct sums align.
        let marked = coordinate_marked(base, point, &[]);
        let alg = FinDimAlgebra::new(0, BTreeMap::new(), Some(Vec::new()), marked)?;
        Ok((alg, Vec::new()))
    }
}
