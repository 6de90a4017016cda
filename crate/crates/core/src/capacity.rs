//! Capacity regions, interference classification, and achievable-rate
//! constructions for two-sender channels.
//!
//! Everything here reduces to Holevo informations evaluated on joint
//! classical-quantum states (see [`crate::entropic`]) and polygon geometry
//! (see [`crate::region`]). Optimizations over input distributions are done
//! by sweeping finite probability grids; results are therefore inner
//! approximations at the grid's resolution, and classification verdicts are
//! certificates *at that resolution* rather than proofs over the continuum.
//!
//! Grid sweeps run through [`crate::par::map_collect`], so they parallelize
//! when the `parallel` feature is on.

use serde::Serialize;

use crate::channel::{CcqMac, CcqqChannel, Distribution};
use crate::entropic::{
    build_hk_state, build_interference_state, build_mac_state, holevo_information,
    CqState, EntropicQuery, OutputSystem,
};
use crate::error::{Error, Result};
use crate::par;
use crate::region::{
    bounded_rate_polygon, half_plane_region, HalfPlane, Pentagon, RatePoint, RateRegion,
};

/// Slack below which a classification inequality counts as violated.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Hard cap on the number of distributions a grid may enumerate.
const GRID_GUARD: u128 = 200_000;

/// Hard cap on the number of auxiliary-input configurations a default
/// family may contain.
const FAMILY_GUARD: u128 = 50_000;

// ---------------------------------------------------------------------------
// Probability grids
// ---------------------------------------------------------------------------

/// All probability vectors of a given length whose entries are multiples of
/// a step `1/k`.
#[derive(Clone, Debug)]
pub struct DistGrid {
    size: usize,
    step: f64,
    dists: Vec<Distribution>,
}

impl DistGrid {
    /// `step` must be the reciprocal of an integer `k ∈ [1, 64]`.
    pub fn new(size: usize, step: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("grid over an empty alphabet".into()));
        }
        if !(step > 0.0) || step > 1.0 {
            return Err(Error::InvalidArgument(format!("grid step {step} not in (0, 1]")));
        }
        let k = (1.0 / step).round();
        if (1.0 / step - k).abs() > 1e-9 || !(1.0..=64.0).contains(&k) {
            return Err(Error::InvalidArgument(format!(
                "grid step {step} is not the reciprocal of an integer in [1, 64]"
            )));
        }
        let k = k as u32;
        let count = compositions_count(k as u128, size as u128);
        if count > GRID_GUARD {
            return Err(Error::GuardExceeded {
                what: "probability grid size",
                got: count,
                limit: GRID_GUARD,
            });
        }
        let mut dists = Vec::with_capacity(count as usize);
        let mut parts = vec![0u32; size];
        fill_compositions(k, 0, &mut parts, &mut |parts| {
            let probs: Vec<f64> = parts.iter().map(|&c| c as f64 / k as f64).collect();
            dists.push(Distribution::new(probs).expect("grid point sums to one"));
        });
        Ok(Self { size, step: 1.0 / k as f64, dists })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn distributions(&self) -> &[Distribution] {
        &self.dists
    }

    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }
}

/// Number of ways to write `total` as an ordered sum of `parts` nonnegative
/// integers: `C(total + parts − 1, parts − 1)`.
fn compositions_count(total: u128, parts: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..parts - 1 {
        acc = acc.saturating_mul(total + i + 1) / (i + 1);
    }
    acc
}

fn fill_compositions(left: u32, idx: usize, parts: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if idx + 1 == parts.len() {
        parts[idx] = left;
        emit(parts);
        return;
    }
    for take in 0..=left {
        parts[idx] = take;
        fill_compositions(left - take, idx + 1, parts, emit);
    }
}

/// All index pairs of two grids, for sweeping product input distributions.
fn grid_pairs(g1: &DistGrid, g2: &DistGrid) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(g1.len() * g2.len());
    for i in 0..g1.len() {
        for j in 0..g2.len() {
            pairs.push((i, j));
        }
    }
    pairs
}

// ---------------------------------------------------------------------------
// Multiple access channels
// ---------------------------------------------------------------------------

/// The five Holevo informations of a two-sender channel with one output,
/// at a fixed product input.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MacInformations {
    /// `I(X1; B | X2)`
    pub conditional1: f64,
    /// `I(X2; B | X1)`
    pub conditional2: f64,
    /// `I(X1 X2; B)`
    pub joint: f64,
    /// `I(X1; B)`
    pub marginal1: f64,
    /// `I(X2; B)`
    pub marginal2: f64,
}

impl MacInformations {
    /// The rate pentagon `{ r1 ≤ conditional1, r2 ≤ conditional2,
    /// r1 + r2 ≤ joint }`.
    pub fn pentagon(&self) -> Result<Pentagon> {
        Pentagon::new(self.conditional1, self.conditional2, self.joint)
    }

    /// The two sum-rate-optimal corner points: first where sender 1 is
    /// decoded treating sender 2 as part of the channel, then the reverse.
    pub fn corner_points(&self) -> [RatePoint; 2] {
        [
            RatePoint::new(self.marginal1, self.joint - self.marginal1),
            RatePoint::new(self.joint - self.marginal2, self.marginal2),
        ]
    }
}

/// Evaluates the five informations of a MAC at a product input.
pub fn mac_informations(
    mac: &CcqMac,
    p1: &Distribution,
    p2: &Distribution,
) -> Result<MacInformations> {
    let st = build_mac_state(mac, p1, p2)?;
    let q = |t: &[&str], c: &[&str]| {
        holevo_information(
            &st,
            &EntropicQuery::new(t.iter().copied(), c.iter().copied(), OutputSystem::Full),
        )
    };
    Ok(MacInformations {
        conditional1: q(&["X1"], &["X2"])?,
        conditional2: q(&["X2"], &["X1"])?,
        joint: q(&["X1", "X2"], &[])?,
        marginal1: q(&["X1"], &[])?,
        marginal2: q(&["X2"], &[])?,
    })
}

/// The rate pentagon of a MAC at one product input.
pub fn mac_capacity_region_at(
    mac: &CcqMac,
    p1: &Distribution,
    p2: &Distribution,
) -> Result<RateRegion> {
    Ok(mac_informations(mac, p1, p2)?.pentagon()?.region())
}

/// The MAC capacity region approximated from below: the convex hull of the
/// rate pentagons over a product grid of input distributions.
pub fn mac_capacity_region(mac: &CcqMac, grid_step: f64) -> Result<RateRegion> {
    let g1 = DistGrid::new(mac.x1().size(), grid_step)?;
    let g2 = DistGrid::new(mac.x2().size(), grid_step)?;
    let pairs = grid_pairs(&g1, &g2);
    let regions = par::map_collect(&pairs, |&(i, j)| {
        mac_capacity_region_at(mac, &g1.distributions()[i], &g2.distributions()[j])
    });
    let regions = regions.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RateRegion::union_hull_all(&regions))
}

// ---------------------------------------------------------------------------
// Interference informations and classification
// ---------------------------------------------------------------------------

/// The Holevo informations of an interference channel at a fixed product
/// input, covering both receivers.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InterferenceInformations {
    /// `I(X1; B1 | X2)` — sender 1 at its own receiver, interference known.
    pub own1: f64,
    /// `I(X2; B2 | X1)`
    pub own2: f64,
    /// `I(X1; B2)` — sender 1 seen from the other receiver.
    pub cross1_marginal: f64,
    /// `I(X2; B1)`
    pub cross2_marginal: f64,
    /// `I(X1; B2 | X2)`
    pub cross1_conditional: f64,
    /// `I(X2; B1 | X1)`
    pub cross2_conditional: f64,
    /// `I(X1 X2; B1)`
    pub joint1: f64,
    /// `I(X1 X2; B2)`
    pub joint2: f64,
    /// `I(X1 X2; B1 B2)` — both outputs together.
    pub joint_both: f64,
}

/// Evaluates all nine informations at one product input.
pub fn interference_informations(
    ch: &CcqqChannel,
    p1: &Distribution,
    p2: &Distribution,
) -> Result<InterferenceInformations> {
    let st = build_interference_state(ch, p1, p2)?;
    let q = |t: &[&str], c: &[&str], out: OutputSystem| {
        holevo_information(
            &st,
            &EntropicQuery::new(t.iter().copied(), c.iter().copied(), out),
        )
    };
    use OutputSystem::{First, Full, Second};
    Ok(InterferenceInformations {
        own1: q(&["X1"], &["X2"], First)?,
        own2: q(&["X2"], &["X1"], Second)?,
        cross1_marginal: q(&["X1"], &[], Second)?,
        cross2_marginal: q(&["X2"], &[], First)?,
        cross1_conditional: q(&["X1"], &["X2"], Second)?,
        cross2_conditional: q(&["X2"], &["X1"], First)?,
        joint1: q(&["X1", "X2"], &[], First)?,
        joint2: q(&["X1", "X2"], &[], Second)?,
        joint_both: q(&["X1", "X2"], &[], Full)?,
    })
}

/// Outcome of checking a regime condition over a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    Violated,
}

/// The input pair and inequality attaining the worst slack.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationWitness {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub condition: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of classifying an interference channel against a regime's
/// defining inequalities on a product-distribution grid.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub grid_step: f64,
    /// Smallest value of `rhs − lhs` seen; negative means violated.
    pub worst_margin: f64,
    pub witness: ClassificationWitness,
}

/// One inequality check at one input pair.
struct Check {
    condition: &'static str,
    lhs: f64,
    rhs: f64,
}

fn classify_with(
    ch: &CcqqChannel,
    grid_step: f64,
    checks: impl Fn(&InterferenceInformations) -> [Check; 2] + Sync,
) -> Result<ClassificationReport> {
    let g1 = DistGrid::new(ch.x1().size(), grid_step)?;
    let g2 = DistGrid::new(ch.x2().size(), grid_step)?;
    let pairs = grid_pairs(&g1, &g2);
    let per_pair = par::map_collect(&pairs, |&(i, j)| {
        let info = interference_informations(
            ch,
            &g1.distributions()[i],
            &g2.distributions()[j],
        )?;
        Ok::<_, Error>((i, j, checks(&info)))
    });

    let mut worst: Option<(f64, usize, usize, &'static str, f64, f64)> = None;
    for res in per_pair {
        let (i, j, pair_checks) = res?;
        for check in pair_checks {
            let margin = check.rhs - check.lhs;
            if worst.map_or(true, |(m, ..)| margin < m) {
                worst = Some((margin, i, j, check.condition, check.lhs, check.rhs));
            }
        }
    }
    let (margin, i, j, condition, lhs, rhs) = worst.expect("grids are never empty");
    Ok(ClassificationReport {
        verdict: if margin < -CLASSIFY_TOL { Verdict::Violated } else { Verdict::Holds },
        grid_step: g1.step(),
        worst_margin: margin,
        witness: ClassificationWitness {
            p1: g1.distributions()[i].probs().to_vec(),
            p2: g2.distributions()[j].probs().to_vec(),
            condition: condition.to_string(),
            lhs,
            rhs,
        },
    })
}

/// Checks, over a grid of product inputs, whether each sender is heard at
/// least as well by the *other* receiver without any side information as by
/// its own receiver with the interference known:
/// `I(X1; B1 | X2) ≤ I(X1; B2)` and `I(X2; B2 | X1) ≤ I(X2; B1)`.
pub fn classify_very_strong(ch: &CcqqChannel, grid_step: f64) -> Result<ClassificationReport> {
    classify_with(ch, grid_step, |info| {
        [
            Check {
                condition: "I(X1;B1|X2) <= I(X1;B2)",
                lhs: info.own1,
                rhs: info.cross1_marginal,
            },
            Check {
                condition: "I(X2;B2|X1) <= I(X2;B1)",
                lhs: info.own2,
                rhs: info.cross2_marginal,
            },
        ]
    })
}

/// Checks the weaker variant where the other receiver also knows the
/// interfering input: `I(X1; B1 | X2) ≤ I(X1; B2 | X2)` and
/// `I(X2; B2 | X1) ≤ I(X2; B1 | X1)`.
pub fn classify_strong(ch: &CcqqChannel, grid_step: f64) -> Result<ClassificationReport> {
    classify_with(ch, grid_step, |info| {
        [
            Check {
                condition: "I(X1;B1|X2) <= I(X1;B2|X2)",
                lhs: info.own1,
                rhs: info.cross1_conditional,
            },
            Check {
                condition: "I(X2;B2|X1) <= I(X2;B1|X1)",
                lhs: info.own2,
                rhs: info.cross2_conditional,
            },
        ]
    })
}

// ---------------------------------------------------------------------------
// Regime capacity regions and the outer bound
// ---------------------------------------------------------------------------

fn sweep_informations(
    ch: &CcqqChannel,
    grid_step: f64,
) -> Result<Vec<InterferenceInformations>> {
    let g1 = DistGrid::new(ch.x1().size(), grid_step)?;
    let g2 = DistGrid::new(ch.x2().size(), grid_step)?;
    let pairs = grid_pairs(&g1, &g2);
    par::map_collect(&pairs, |&(i, j)| {
        interference_informations(ch, &g1.distributions()[i], &g2.distributions()[j])
    })
    .into_iter()
    .collect()
}

/// Capacity region under very strong interference: the hull of the
/// rectangles `[0, I(X1;B1|X2)] × [0, I(X2;B2|X1)]` over the input grid.
/// The accompanying report says whether the regime condition held on the
/// same grid; the region is only meaningful when it does.
pub fn very_strong_capacity_region(
    ch: &CcqqChannel,
    grid_step: f64,
) -> Result<(RateRegion, ClassificationReport)> {
    let report = classify_very_strong(ch, grid_step)?;
    let infos = sweep_informations(ch, grid_step)?;
    let points: Vec<RatePoint> =
        infos.iter().map(|i| RatePoint::new(i.own1, i.own2)).collect();
    Ok((RateRegion::down_set_hull(&points), report))
}

/// Capacity region under strong interference: the hull over the input grid
/// of `{ r1 ≤ I(X1;B1|X2), r2 ≤ I(X2;B2|X1),
/// r1 + r2 ≤ min(I(X1X2;B1), I(X1X2;B2)) }`.
pub fn strong_capacity_region(
    ch: &CcqqChannel,
    grid_step: f64,
) -> Result<(RateRegion, ClassificationReport)> {
    let report = classify_strong(ch, grid_step)?;
    let infos = sweep_informations(ch, grid_step)?;
    let regions: Vec<RateRegion> = infos
        .iter()
        .map(|i| bounded_rate_polygon(i.own1, i.own2, i.joint1.min(i.joint2)))
        .collect();
    Ok((RateRegion::union_hull_all(&regions), report))
}

/// The outer bound `{ r1 ≤ I(X1;B1|X2), r2 ≤ I(X2;B2|X1),
/// r1 + r2 ≤ I(X1X2;B1B2) }` at one product input. The sum-rate term sees
/// both outputs jointly and may exceed `own1 + own2`, in which case the
/// polygon degenerates to the rectangle.
pub fn sato_outer_region_at(
    ch: &CcqqChannel,
    p1: &Distribution,
    p2: &Distribution,
) -> Result<RateRegion> {
    let info = interference_informations(ch, p1, p2)?;
    Ok(bounded_rate_polygon(info.own1, info.own2, info.joint_both))
}

/// The outer bound over explicit input pairs: the hull of the per-input
/// outer polygons.
pub fn sato_outer_region_for(
    ch: &CcqqChannel,
    pairs: &[(Distribution, Distribution)],
) -> Result<RateRegion> {
    let regions = par::map_collect(pairs, |(p1, p2)| sato_outer_region_at(ch, p1, p2));
    let regions = regions.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RateRegion::union_hull_all(&regions))
}

/// The outer bound swept over a product-distribution grid.
pub fn sato_outer_region(ch: &CcqqChannel, grid_step: f64) -> Result<RateRegion> {
    let g1 = DistGrid::new(ch.x1().size(), grid_step)?;
    let g2 = DistGrid::new(ch.x2().size(), grid_step)?;
    let mut pairs = Vec::new();
    for p1 in g1.distributions() {
        for p2 in g2.distributions() {
            pairs.push((p1.clone(), p2.clone()));
        }
    }
    sato_outer_region_for(ch, &pairs)
}

// ---------------------------------------------------------------------------
// Rate splitting: mixing tables and auxiliary-input configurations
// ---------------------------------------------------------------------------

/// A deterministic map `(u, w) ↦ x` combining a sender's personal part `u`
/// and common part `w` into a channel input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixTable {
    u_size: usize,
    w_size: usize,
    x_size: usize,
    /// Row-major over `(u, w)`.
    map: Vec<usize>,
}

impl MixTable {
    pub fn new(u_size: usize, w_size: usize, x_size: usize, map: Vec<usize>) -> Result<Self> {
        if u_size == 0 || w_size == 0 || x_size == 0 {
            return Err(Error::InvalidArgument("mixing table over an empty alphabet".into()));
        }
        if map.len() != u_size * w_size {
            return Err(Error::DimensionMismatch(format!(
                "mixing table needs {} entries, got {}",
                u_size * w_size,
                map.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&x| x >= x_size) {
            return Err(Error::InvalidArgument(format!(
                "mixing table value {bad} outside output alphabet of size {x_size}"
            )));
        }
        Ok(Self { u_size, w_size, x_size, map })
    }

    /// Everything is personal: `u ↦ u`, the common alphabet is trivial.
    pub fn identity_personal(x_size: usize) -> Self {
        Self {
            u_size: x_size,
            w_size: 1,
            x_size,
            map: (0..x_size).collect(),
        }
    }

    /// Everything is common: `w ↦ w`, the personal alphabet is trivial.
    pub fn identity_common(x_size: usize) -> Self {
        Self {
            u_size: 1,
            w_size: x_size,
            x_size,
            map: (0..x_size).collect(),
        }
    }

    /// Binary exclusive-or mixer `x = u ⊕ w`.
    pub fn xor2() -> Self {
        Self { u_size: 2, w_size: 2, x_size: 2, map: vec![0, 1, 1, 0] }
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn w_size(&self) -> usize {
        self.w_size
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn map(&self, u: usize, w: usize) -> usize {
        self.map[u * self.w_size + w]
    }
}

/// An auxiliary-input configuration: independent distributions over each
/// sender's personal and common parts, plus the two mixing tables.
#[derive(Clone, Debug, Serialize)]
pub struct HkInput {
    pu1: Distribution,
    pw1: Distribution,
    pu2: Distribution,
    pw2: Distribution,
    f1: MixTable,
    f2: MixTable,
}

impl HkInput {
    pub fn new(
        pu1: Distribution,
        pw1: Distribution,
        pu2: Distribution,
        pw2: Distribution,
        f1: MixTable,
        f2: MixTable,
    ) -> Result<Self> {
        if pu1.len() != f1.u_size() || pw1.len() != f1.w_size() {
            return Err(Error::DimensionMismatch(format!(
                "sender 1 distributions of sizes {}x{} for a {}x{} mixing table",
                pu1.len(),
                pw1.len(),
                f1.u_size(),
                f1.w_size()
            )));
        }
        if pu2.len() != f2.u_size() || pw2.len() != f2.w_size() {
            return Err(Error::DimensionMismatch(format!(
                "sender 2 distributions of sizes {}x{} for a {}x{} mixing table",
                pu2.len(),
                pw2.len(),
                f2.u_size(),
                f2.w_size()
            )));
        }
        Ok(Self { pu1, pw1, pu2, pw2, f1, f2 })
    }

    /// Configuration where each sender's input is carried entirely by its
    /// personal part (`common` false) or entirely by its common part.
    pub fn degenerate(
        p1: Distribution,
        p2: Distribution,
        common1: bool,
        common2: bool,
    ) -> Self {
        let split = |p: Distribution, common: bool| {
            let n = p.len();
            if common {
                (Distribution::uniform(1), p, MixTable::identity_common(n))
            } else {
                (p, Distribution::uniform(1), MixTable::identity_personal(n))
            }
        };
        let (pu1, pw1, f1) = split(p1, common1);
        let (pu2, pw2, f2) = split(p2, common2);
        Self { pu1, pw1, pu2, pw2, f1, f2 }
    }

    pub fn pu1(&self) -> &Distribution {
        &self.pu1
    }

    pub fn pw1(&self) -> &Distribution {
        &self.pw1
    }

    pub fn pu2(&self) -> &Distribution {
        &self.pu2
    }

    pub fn pw2(&self) -> &Distribution {
        &self.pw2
    }

    pub fn f1(&self) -> &MixTable {
        &self.f1
    }

    pub fn f2(&self) -> &MixTable {
        &self.f2
    }

    /// Checks the mixing tables produce inputs of this channel's alphabets.
    pub fn validate_against(&self, ch: &CcqqChannel) -> Result<()> {
        if self.f1.x_size() != ch.x1().size() || self.f2.x_size() != ch.x2().size() {
            return Err(Error::DimensionMismatch(format!(
                "mixing tables produce alphabets {}x{}, channel expects {}x{}",
                self.f1.x_size(),
                self.f2.x_size(),
                ch.x1().size(),
                ch.x2().size()
            )));
        }
        Ok(())
    }

    /// The product-input marginals this configuration induces on the
    /// channel alphabets.
    pub fn induced_input_distributions(&self) -> (Distribution, Distribution) {
        let push = |pu: &Distribution, pw: &Distribution, f: &MixTable| {
            let mut probs = vec![0.0; f.x_size()];
            for u in 0..pu.len() {
                for w in 0..pw.len() {
                    probs[f.map(u, w)] += pu.prob(u) * pw.prob(w);
                }
            }
            Distribution::new(probs).expect("pushforward of a distribution")
        };
        (
            push(&self.pu1, &self.pw1, &self.f1),
            push(&self.pu2, &self.pw2, &self.f2),
        )
    }
}

/// The default family of auxiliary-input configurations for a channel.
///
/// For every pair on the product-distribution grid it contains the four
/// degenerate splits (each sender all-personal or all-common). When both
/// input alphabets are binary it additionally sweeps the exclusive-or mixer
/// over a coarse grid (step 1/4) of all four auxiliary distributions. The
/// family size is capped; channels with large alphabets need a coarser
/// `grid_step`.
pub fn default_hk_family(ch: &CcqqChannel, grid_step: f64) -> Result<Vec<HkInput>> {
    let g1 = DistGrid::new(ch.x1().size(), grid_step)?;
    let g2 = DistGrid::new(ch.x2().size(), grid_step)?;
    let degenerate = 4u128 * g1.len() as u128 * g2.len() as u128;
    let binary = ch.x1().size() == 2 && ch.x2().size() == 2;
    let mixer_grid = if binary { Some(DistGrid::new(2, 0.25)?) } else { None };
    let mixed = mixer_grid.as_ref().map_or(0u128, |g| (g.len() as u128).pow(4));
    let total = degenerate + mixed;
    if total > FAMILY_GUARD {
        return Err(Error::GuardExceeded {
            what: "auxiliary-input family size",
            got: total,
            limit: FAMILY_GUARD,
        });
    }

    let mut family = Vec::with_capacity(total as usize);
    for p1 in g1.distributions() {
        for p2 in g2.distributions() {
            for common1 in [false, true] {
                for common2 in [false, true] {
                    family.push(HkInput::degenerate(
                        p1.clone(),
                        p2.clone(),
                        common1,
                        common2,
                    ));
                }
            }
        }
    }
    if let Some(g) = mixer_grid {
        for pu1 in g.distributions() {
            for pw1 in g.distributions() {
                for pu2 in g.distributions() {
                    for pw2 in g.distributions() {
                        family.push(
                            HkInput::new(
                                pu1.clone(),
                                pw1.clone(),
                                pu2.clone(),
                                pw2.clone(),
                                MixTable::xor2(),
                                MixTable::xor2(),
                            )
                            .expect("table sizes match by construction"),
                        );
                    }
                }
            }
        }
    }
    Ok(family)
}

// ---------------------------------------------------------------------------
// The nine-constraint achievable region
// ---------------------------------------------------------------------------

/// Right-hand sides of the nine rate constraints of the simultaneous-
/// decoding achievable region at one auxiliary-input configuration.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HkConstraints {
    /// Bounds on `r1`:
    /// `I(U1W1;B1|W2)` and `I(U1;B1|W1W2) + I(W1;B2|U2W2)`.
    pub r1: [f64; 2],
    /// Bounds on `r2`:
    /// `I(U2W2;B2|W1)` and `I(U2;B2|W1W2) + I(W2;B1|U1W1)`.
    pub r2: [f64; 2],
    /// Bounds on `r1 + r2`:
    /// `I(U1W1W2;B1) + I(U2;B2|W1W2)`,
    /// `I(U1;B1|W1W2) + I(U2W2W1;B2)`,
    /// `I(U1W2;B1|W1) + I(U2W1;B2|W2)`.
    pub sum: [f64; 3],
    /// Bound on `2·r1 + r2`:
    /// `I(U1;B1|W1W2) + I(U2W1;B2|W2) + I(U1W1W2;B1)`.
    pub double1: f64,
    /// Bound on `r1 + 2·r2`:
    /// `I(U1W2;B1|W1) + I(U2;B2|W1W2) + I(U2W2W1;B2)`.
    pub double2: f64,
}

impl HkConstraints {
    /// The polygon cut out by the nine half-planes in the nonnegative
    /// quadrant.
    pub fn polygon(&self) -> RateRegion {
        let r1_cap = self.r1[0].min(self.r1[1]);
        let r2_cap = self.r2[0].min(self.r2[1]);
        let bound = r1_cap.max(r2_cap) + 1.0;
        half_plane_region(
            &[
                HalfPlane::new(1.0, 0.0, self.r1[0]),
                HalfPlane::new(1.0, 0.0, self.r1[1]),
                HalfPlane::new(0.0, 1.0, self.r2[0]),
                HalfPlane::new(0.0, 1.0, self.r2[1]),
                HalfPlane::new(1.0, 1.0, self.sum[0]),
                HalfPlane::new(1.0, 1.0, self.sum[1]),
                HalfPlane::new(1.0, 1.0, self.sum[2]),
                HalfPlane::new(2.0, 1.0, self.double1),
                HalfPlane::new(1.0, 2.0, self.double2),
            ],
            bound,
        )
    }
}

/// Evaluates the nine constraint right-hand sides at one configuration.
pub fn hk_constraints(ch: &CcqqChannel, input: &HkInput) -> Result<HkConstraints> {
    let st = build_hk_state(ch, input)?;
    let q = |t: &[&str], c: &[&str], out: OutputSystem| {
        holevo_information(
            &st,
            &EntropicQuery::new(t.iter().copied(), c.iter().copied(), out),
        )
    };
    use OutputSystem::{First, Second};
    // Receiver 1 sees B1.
    let u1w1_b1_w2 = q(&["U1", "W1"], &["W2"], First)?;
    let u1_b1_w1w2 = q(&["U1"], &["W1", "W2"], First)?;
    let w2_b1_u1w1 = q(&["W2"], &["U1", "W1"], First)?;
    let u1w1w2_b1 = q(&["U1", "W1", "W2"], &[], First)?;
    let u1w2_b1_w1 = q(&["U1", "W2"], &["W1"], First)?;
    // Receiver 2 sees B2.
    let u2w2_b2_w1 = q(&["U2", "W2"], &["W1"], Second)?;
    let u2_b2_w1w2 = q(&["U2"], &["W1", "W2"], Second)?;
    let w1_b2_u2w2 = q(&["W1"], &["U2", "W2"], Second)?;
    let u2w2w1_b2 = q(&["U2", "W2", "W1"], &[], Second)?;
    let u2w1_b2_w2 = q(&["U2", "W1"], &["W2"], Second)?;

    Ok(HkConstraints {
        r1: [u1w1_b1_w2, u1_b1_w1w2 + w1_b2_u2w2],
        r2: [u2w2_b2_w1, u2_b2_w1w2 + w2_b1_u1w1],
        sum: [
            u1w1w2_b1 + u2_b2_w1w2,
            u1_b1_w1w2 + u2w2w1_b2,
            u1w2_b1_w1 + u2w1_b2_w2,
        ],
        double1: u1_b1_w1w2 + u2w1_b2_w2 + u1w1w2_b1,
        double2: u1w2_b1_w1 + u2_b2_w1w2 + u2w2w1_b2,
    })
}

/// The nine-constraint polygon at one configuration.
pub fn hk_region_at(ch: &CcqqChannel, input: &HkInput) -> Result<RateRegion> {
    Ok(hk_constraints(ch, input)?.polygon())
}

/// The achievable region over a family of configurations: the convex hull
/// of the per-configuration polygons.
pub fn hk_region(ch: &CcqqChannel, family: &[HkInput]) -> Result<RateRegion> {
    let regions = par::map_collect(family, |input| hk_region_at(ch, input));
    let regions = regions.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RateRegion::union_hull_all(&regions))
}

// ---------------------------------------------------------------------------
// Sequential decoding with rate splitting
// ---------------------------------------------------------------------------

/// Rates supportable at one receiver for each decoded variable under every
/// possible decoding prefix: `rate[v][mask]` is the Holevo information of
/// variable `v` given the subset of the other two variables encoded by
/// `mask` (bit 0: the lower-indexed other, bit 1: the higher-indexed).
fn receiver_rates(
    st: &CqState,
    vars: [&str; 3],
    out: OutputSystem,
) -> Result<[[f64; 4]; 3]> {
    let mut rates = [[0.0; 4]; 3];
    for v in 0..3 {
        let others: Vec<&str> = (0..3).filter(|&o| o != v).map(|o| vars[o]).collect();
        for mask in 0..4usize {
            let conditioning: Vec<&str> = (0..2)
                .filter(|&b| mask & (1 << b) != 0)
                .map(|b| others[b])
                .collect();
            rates[v][mask] = holevo_information(
                st,
                &EntropicQuery::new(
                    [vars[v]].into_iter(),
                    conditioning.into_iter(),
                    out,
                ),
            )?;
        }
    }
    Ok(rates)
}

const PERMS3: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Prefix mask of variable `v` under decoding order `perm`: which of the
/// other two variables are decoded before it.
fn prefix_mask(perm: &[usize; 3], v: usize) -> usize {
    let pos = perm.iter().position(|&x| x == v).unwrap();
    let others: Vec<usize> = (0..3).filter(|&o| o != v).collect();
    let mut mask = 0;
    for (b, &o) in others.iter().enumerate() {
        if perm.iter().position(|&x| x == o).unwrap() < pos {
            mask |= 1 << b;
        }
    }
    mask
}

/// Rate pairs achievable by sequential decoding with rate splitting at one
/// configuration.
///
/// Receiver 1 decodes `(U1, W1, W2)` from `B1` and receiver 2 decodes
/// `(U2, W2, W1)` from `B2`, each in all six possible orders, peeling off
/// one variable at a time. A common part must be decodable at both
/// receivers, so its rate is the smaller of the two supportable rates;
/// personal parts count only at their own receiver. One rate pair per
/// order combination, 36 in total.
pub fn sd_rs_points(ch: &CcqqChannel, input: &HkInput) -> Result<Vec<RatePoint>> {
    let st = build_hk_state(ch, input)?;
    // Variable index 0 is the personal part, 1 the own common part, and 2
    // the other sender's common part.
    let rates1 = receiver_rates(&st, ["U1", "W1", "W2"], OutputSystem::First)?;
    let rates2 = receiver_rates(&st, ["U2", "W2", "W1"], OutputSystem::Second)?;
    let mut points = Vec::with_capacity(36);
    for perm1 in &PERMS3 {
        for perm2 in &PERMS3 {
            let u1 = rates1[0][prefix_mask(perm1, 0)];
            let w1_at_1 = rates1[1][prefix_mask(perm1, 1)];
            let w2_at_1 = rates1[2][prefix_mask(perm1, 2)];
            let u2 = rates2[0][prefix_mask(perm2, 0)];
            let w2_at_2 = rates2[1][prefix_mask(perm2, 1)];
            let w1_at_2 = rates2[2][prefix_mask(perm2, 2)];
            points.push(RatePoint::new(
                u1 + w1_at_1.min(w1_at_2),
                u2 + w2_at_2.min(w2_at_1),
            ));
        }
    }
    Ok(points)
}

/// The sequential-decoding achievable region over a family of
/// configurations: the down-closed hull of all order-combination points.
pub fn sd_rs_region(ch: &CcqqChannel, family: &[HkInput]) -> Result<RateRegion> {
    let batches = par::map_collect(family, |input| sd_rs_points(ch, input));
    let mut points = Vec::new();
    for batch in batches {
        points.extend(batch?);
    }
    Ok(RateRegion::down_set_hull(&points))
}

// ---------------------------------------------------------------------------
// Plain successive decoding (no rate splitting)
// ---------------------------------------------------------------------------

/// Rate pairs achievable by successive decoding without rate splitting at
/// one product input.
///
/// Each receiver decodes the two messages in one of two orders, except that
/// it may stop before the other sender's message when that message comes
/// last. One rate pair per order combination:
///
/// * both receivers decode their own message first (treating the other as
///   noise) — sender 1's rate must also survive receiver 2's first stage;
/// * each receiver decodes only its own message;
/// * both receivers decode sender 2's message first;
/// * receiver 1 peels off sender 2 first, receiver 2 decodes both in
///   either order, giving the two remaining combinations.
pub fn successive_decoding_pairs(
    ch: &CcqqChannel,
    p1: &Distribution,
    p2: &Distribution,
) -> Result<[RatePoint; 4]> {
    let info = interference_informations(ch, p1, p2)?;
    let st = build_interference_state(ch, p1, p2)?;
    let q = |t: &[&str], c: &[&str], out: OutputSystem| {
        holevo_information(
            &st,
            &EntropicQuery::new(t.iter().copied(), c.iter().copied(), out),
        )
    };
    // Marginals at each receiver's first decoding stage.
    let x1_b1 = q(&["X1"], &[], OutputSystem::First)?;
    let x2_b2 = q(&["X2"], &[], OutputSystem::Second)?;
    Ok([
        // Receiver 1: m1 only; receiver 2: m1 then m2.
        RatePoint::new(x1_b1.min(info.cross1_marginal), info.own2),
        // Receiver 1: m1 only; receiver 2: m2 only.
        RatePoint::new(x1_b1, x2_b2),
        // Receiver 1: m2 then m1; receiver 2: m1 then m2.
        RatePoint::new(
            info.own1.min(info.cross1_marginal),
            info.cross2_marginal.min(info.own2),
        ),
        // Receiver 1: m2 then m1; receiver 2: m2 only.
        RatePoint::new(info.own1, info.cross2_marginal.min(x2_b2)),
    ])
}

/// The successive-decoding achievable region over a product grid.
pub fn successive_region(ch: &CcqqChannel, grid_step: f64) -> Result<RateRegion> {
    let g1 = DistGrid::new(ch.x1().size(), grid_step)?;
    let g2 = DistGrid::new(ch.x2().size(), grid_step)?;
    let pairs = grid_pairs(&g1, &g2);
    let batches = par::map_collect(&pairs, |&(i, j)| {
        successive_decoding_pairs(ch, &g1.distributions()[i], &g2.distributions()[j])
    });
    let mut points = Vec::new();
    for batch in batches {
        points.extend(batch?);
    }
    Ok(RateRegion::down_set_hull(&points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        classical_embed, classical_mac_embed, induced_mac, ConditionalTable, Receiver,
    };
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn binary_entropy(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    /// y = x1 + x2 over {0, 1, 2}.
    fn adder_mac() -> CcqMac {
        let mut probs = vec![0.0; 12];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                probs[(x1 * 2 + x2) * 3 + x1 + x2] = 1.0;
            }
        }
        classical_mac_embed(2, 2, 3, &probs).unwrap()
    }

    /// Each receiver sees the *other* sender's bit, noiselessly.
    fn crossover_channel() -> CcqqChannel {
        let mut probs = vec![0.0; 2 * 2 * 2 * 2];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                let idx = ((x1 * 2 + x2) * 2 + x2) * 2 + x1;
                probs[idx] = 1.0;
            }
        }
        let table = ConditionalTable::new(2, 2, 2, 2, probs).unwrap();
        classical_embed(&table).unwrap()
    }

    /// Each receiver sees its own sender's bit, noiselessly; no coupling.
    fn identity_channel() -> CcqqChannel {
        let mut probs = vec![0.0; 16];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                let idx = ((x1 * 2 + x2) * 2 + x1) * 2 + x2;
                probs[idx] = 1.0;
            }
        }
        let table = ConditionalTable::new(2, 2, 2, 2, probs).unwrap();
        classical_embed(&table).unwrap()
    }

    /// Receiver 1 sees x1 through a bit flip and x2 clean; receiver 2
    /// mirrors it. Both cross links dominate the direct ones.
    fn mixed_flip_channel(flip: f64) -> CcqqChannel {
        // B1 = (noisy x1, clean x2): dB1 = 4 with basis |n1 x2⟩; B2 = (clean
        // x1, noisy x2).
        let mut probs = vec![0.0; 2 * 2 * 4 * 4];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for n1 in 0..2usize {
                    let pn1 = if n1 == x1 { 1.0 - flip } else { flip };
                    for n2 in 0..2usize {
                        let pn2 = if n2 == x2 { 1.0 - flip } else { flip };
                        let y1 = n1 * 2 + x2;
                        let y2 = x1 * 2 + n2;
                        probs[((x1 * 2 + x2) * 4 + y1) * 4 + y2] += pn1 * pn2;
                    }
                }
            }
        }
        let table = ConditionalTable::new(2, 2, 4, 4, probs).unwrap();
        classical_embed(&table).unwrap()
    }

    fn random_channel(rng: &mut StdRng, y1: usize, y2: usize) -> CcqqChannel {
        let mut probs = vec![0.0; 2 * 2 * y1 * y2];
        for x1 in 0..2 {
            for x2 in 0..2 {
                let base = (x1 * 2 + x2) * y1 * y2;
                let row: Vec<f64> = (0..y1 * y2).map(|_| rng.gen::<f64>()).collect();
                let sum: f64 = row.iter().sum();
                for (k, v) in row.iter().enumerate() {
                    probs[base + k] = v / sum;
                }
            }
        }
        let table = ConditionalTable::new(2, 2, y1, y2, probs).unwrap();
        classical_embed(&table).unwrap()
    }

    #[test]
    fn grid_enumerates_simplex_steps() {
        let g = DistGrid::new(2, 0.25).unwrap();
        assert_eq!(g.len(), 5);
        assert!(g
            .distributions()
            .iter()
            .any(|d| d.prob(0) == 0.75 && d.prob(1) == 0.25));
        let g3 = DistGrid::new(3, 0.25).unwrap();
        assert_eq!(g3.len(), 15);
        assert!(DistGrid::new(2, 0.3).is_err());
        assert!(DistGrid::new(2, 0.0).is_err());
    }

    #[test]
    fn adder_informations_and_pentagon() {
        let info =
            mac_informations(&adder_mac(), &Distribution::uniform(2), &Distribution::uniform(2))
                .unwrap();
        assert!((info.conditional1 - 1.0).abs() < 1e-12);
        assert!((info.conditional2 - 1.0).abs() < 1e-12);
        assert!((info.joint - 1.5).abs() < 1e-12);
        assert!((info.marginal1 - 0.5).abs() < 1e-12);
        let pentagon = info.pentagon().unwrap().region();
        assert!((pentagon.max_sum_rate() - 1.5).abs() < 1e-9);
        for corner in info.corner_points() {
            assert!(pentagon.contains(corner, 1e-9), "corner {corner:?} outside");
        }
    }

    #[test]
    fn parallel_bits_fill_the_unit_square() {
        // y = (x1, x2) noiselessly: every rate pair up to (1, 1).
        let mut probs = vec![0.0; 16];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                probs[(x1 * 2 + x2) * 4 + (x1 * 2 + x2)] = 1.0;
            }
        }
        let mac = classical_mac_embed(2, 2, 4, &probs).unwrap();
        let region = mac_capacity_region(&mac, 0.25).unwrap();
        assert!((region.max_r1() - 1.0).abs() < 1e-9);
        assert!((region.max_r2() - 1.0).abs() < 1e-9);
        assert!((region.max_sum_rate() - 2.0).abs() < 1e-9);
        assert!(region.contains(RatePoint::new(1.0, 1.0), 1e-9));
    }

    #[test]
    fn grid_region_contains_every_pentagon() {
        let mut rng = StdRng::seed_from_u64(11);
        let ch = random_channel(&mut rng, 3, 2);
        let mac = induced_mac(&ch, Receiver::One).unwrap();
        let region = mac_capacity_region(&mac, 0.25).unwrap();
        let g = DistGrid::new(2, 0.25).unwrap();
        for p1 in g.distributions() {
            for p2 in g.distributions() {
                let pent = mac_capacity_region_at(&mac, p1, p2).unwrap();
                assert!(region.contains_region(&pent, 1e-9));
            }
        }
    }

    #[test]
    fn crossover_is_very_strong_and_strong() {
        let ch = crossover_channel();
        let report = classify_very_strong(&ch, 0.25).unwrap();
        assert_eq!(report.verdict, Verdict::Holds);
        assert!(report.worst_margin >= -CLASSIFY_TOL);
        let report = classify_strong(&ch, 0.25).unwrap();
        assert_eq!(report.verdict, Verdict::Holds);
    }

    #[test]
    fn identity_channel_violates_both_regimes() {
        let ch = identity_channel();
        let report = classify_very_strong(&ch, 0.25).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        assert!(report.worst_margin < -CLASSIFY_TOL);
        // The witness pins down a genuinely violating input pair.
        let w = &report.witness;
        assert!(w.lhs > w.rhs + CLASSIFY_TOL, "witness {w:?} does not violate");
        let report = classify_strong(&ch, 0.25).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
    }

    #[test]
    fn mixed_flip_channel_has_known_very_strong_region() {
        let flip = 0.3;
        let ch = mixed_flip_channel(flip);
        let (region, report) = very_strong_capacity_region(&ch, 0.25).unwrap();
        assert_eq!(report.verdict, Verdict::Holds);
        // Per-sender rates max out at the capacity of the direct noisy bit.
        let expected = 1.0 - binary_entropy(flip);
        assert!((region.max_r1() - expected).abs() < 1e-9);
        assert!((region.max_r2() - expected).abs() < 1e-9);
        assert!(region.contains(RatePoint::new(expected, expected), 1e-9));
    }

    #[test]
    fn strong_region_contains_very_strong_region_here() {
        let ch = mixed_flip_channel(0.2);
        let (vs, _) = very_strong_capacity_region(&ch, 0.25).unwrap();
        let (s, report) = strong_capacity_region(&ch, 0.25).unwrap();
        assert_eq!(report.verdict, Verdict::Holds);
        assert!(s.contains_region(&vs, 1e-9));
    }

    #[test]
    fn outer_bound_contains_achievable_regions() {
        let mut rng = StdRng::seed_from_u64(5);
        let ch = random_channel(&mut rng, 2, 2);
        let sato = sato_outer_region(&ch, 0.25).unwrap();
        let successive = successive_region(&ch, 0.25).unwrap();
        assert!(sato.contains_region(&successive, 1e-9));
    }

    #[test]
    fn mix_table_validation() {
        assert!(MixTable::new(2, 2, 2, vec![0, 1, 1, 0]).is_ok());
        assert!(MixTable::new(2, 2, 2, vec![0, 1, 2, 0]).is_err());
        assert!(MixTable::new(2, 2, 2, vec![0, 1]).is_err());
        let xor = MixTable::xor2();
        assert_eq!(xor.map(1, 1), 0);
        assert_eq!(xor.map(1, 0), 1);
    }

    #[test]
    fn induced_distributions_push_through_the_mixer() {
        let input = HkInput::new(
            Distribution::new(vec![0.5, 0.5]).unwrap(),
            Distribution::point_mass(2, 0),
            Distribution::new(vec![0.25, 0.75]).unwrap(),
            Distribution::point_mass(2, 1),
            MixTable::xor2(),
            MixTable::xor2(),
        )
        .unwrap();
        let (q1, q2) = input.induced_input_distributions();
        // w1 = 0 almost surely, so x1 = u1.
        assert!((q1.prob(0) - 0.5).abs() < 1e-15);
        // w2 = 1 almost surely, so x2 = 1 − u2.
        assert!((q2.prob(0) - 0.75).abs() < 1e-15);
        assert!((q2.prob(1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn all_personal_split_gives_the_marginal_rectangle() {
        let mut rng = StdRng::seed_from_u64(23);
        let ch = random_channel(&mut rng, 2, 3);
        let p1 = Distribution::new(vec![0.4, 0.6]).unwrap();
        let p2 = Distribution::new(vec![0.7, 0.3]).unwrap();
        let input = HkInput::degenerate(p1.clone(), p2.clone(), false, false);
        let polygon = hk_region_at(&ch, &input).unwrap();
        let st = build_interference_state(&ch, &p1, &p2).unwrap();
        let i1 = holevo_information(
            &st,
            &EntropicQuery::new(["X1"], [], OutputSystem::First),
        )
        .unwrap();
        let i2 = holevo_information(
            &st,
            &EntropicQuery::new(["X2"], [], OutputSystem::Second),
        )
        .unwrap();
        let rect = RateRegion::rectangle(i1, i2);
        assert!(polygon.contains_region(&rect, 1e-9));
        assert!(rect.contains_region(&polygon, 1e-9));
    }

    #[test]
    fn all_common_split_intersects_the_two_pentagons() {
        let mut rng = StdRng::seed_from_u64(29);
        let ch = random_channel(&mut rng, 3, 2);
        let p1 = Distribution::new(vec![0.5, 0.5]).unwrap();
        let p2 = Distribution::new(vec![0.25, 0.75]).unwrap();
        let input = HkInput::degenerate(p1.clone(), p2.clone(), true, true);
        let polygon = hk_region_at(&ch, &input).unwrap();
        let mac1 = induced_mac(&ch, Receiver::One).unwrap();
        let mac2 = induced_mac(&ch, Receiver::Two).unwrap();
        let pent1 = mac_capacity_region_at(&mac1, &p1, &p2).unwrap();
        let pent2 = mac_capacity_region_at(&mac2, &p1, &p2).unwrap();
        let both = pent1.intersect(&pent2);
        assert!(polygon.contains_region(&both, 1e-9));
        assert!(both.contains_region(&polygon, 1e-9));
    }

    #[test]
    fn split_points_cover_plain_successive_decoding() {
        let mut rng = StdRng::seed_from_u64(31);
        let ch = random_channel(&mut rng, 2, 2);
        let p1 = Distribution::new(vec![0.5, 0.5]).unwrap();
        let p2 = Distribution::new(vec![0.75, 0.25]).unwrap();
        let plain = successive_decoding_pairs(&ch, &p1, &p2).unwrap();
        let mut split_points = Vec::new();
        for common1 in [false, true] {
            for common2 in [false, true] {
                let input = HkInput::degenerate(p1.clone(), p2.clone(), common1, common2);
                split_points.extend(sd_rs_points(&ch, &input).unwrap());
            }
        }
        let region = RateRegion::down_set_hull(&split_points);
        for p in plain {
            assert!(
                region.contains(p, 1e-9),
                "plain successive point {p:?} not covered"
            );
        }
    }

    #[test]
    fn achievable_chain_is_nested() {
        let mut rng = StdRng::seed_from_u64(37);
        let ch = random_channel(&mut rng, 2, 2);
        let family = default_hk_family(&ch, 0.5).unwrap();
        let successive = successive_region(&ch, 0.5).unwrap();
        let split = sd_rs_region(&ch, &family).unwrap();
        let nine = hk_region(&ch, &family).unwrap();
        assert!(split.contains_region(&successive, 1e-9));
        assert!(nine.contains_region(&split, 1e-9));
    }

    #[test]
    fn default_family_counts_and_caps() {
        let ch = crossover_channel();
        let family = default_hk_family(&ch, 0.5).unwrap();
        // 3 × 3 grid pairs × 4 splits, plus the 5⁴ exclusive-or block.
        assert_eq!(family.len(), 36 + 625);
        assert!(matches!(
            DistGrid::new(12, 1.0 / 64.0),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn split_configuration_size_mismatch_errors() {
        assert!(HkInput::new(
            Distribution::uniform(3),
            Distribution::uniform(2),
            Distribution::uniform(2),
            Distribution::uniform(2),
            MixTable::xor2(),
            MixTable::xor2(),
        )
        .is_err());
        let ch = crossover_channel();
        let input = HkInput::degenerate(
            Distribution::uniform(3),
            Distribution::uniform(2),
            false,
            false,
        );
        assert!(input.validate_against(&ch).is_err());
    }
}
