//! Multi-level normal forms of `N + (nonlinear Euler-family terms)`.
//!
//! Level 1 clears every `A^l` with `l >= 1`, grade by grade in the degree
//! grading. Levels 2 and 3 work in a weighted grading in which the leading
//! part `X = N + a A^0_lead` is homogeneous. At each grade the non-`A^0`
//! terms of `[T, X]` are cancelled by a triangular chain and the `A^0`
//! slots that remain reachable are cleared by an echelon over the kernel
//! generators of `ad_N`. Level 3 adds the symmetries of `X` bracketed with
//! the next nonzero homogeneous component.
//!
//! Free directions are always set to zero, so each level is idempotent.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::Rational;
use crate::liealg::{comb_bracket_truncated, LieComb, LieError, OrbitElement};
use crate::linalg::{Echelon, Insertion, SparseVec};
use crate::polyvf::Dim;
use crate::symcoeff::{Coefficient, ParamPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalFormError {
    #[error("the input must contain the nilpotent part N")]
    MissingNilpotent,
    #[error("{0} has degree 0; nonlinear terms must have degree at least 1")]
    GradingViolation(OrbitElement),
    #[error("a transformation generator must not contain N")]
    GeneratorWithN,
    #[error("numeric mode needs constant coefficients, {0} has {1}")]
    NotNumeric(OrbitElement, String),
    #[error("levels 2 and 3 need numeric mode")]
    RequiresNumeric,
    #[error("level {0} must run before level {1}")]
    LevelOrder(u8, u8),
    #[error("the leading part must be N + a*A^0 with a single nonzero term")]
    InvalidLeading,
    #[error("the target of a generator chain needs l >= 1, got {0}")]
    InvalidTarget(OrbitElement),
    #[error("degenerate chain: step {step} brackets two terms of equal degree")]
    DegenerateChain { step: u32 },
    #[error(
        "no delta-free A^0 term (lowest delta power is {s}); the weighted grading is not positive"
    )]
    NoPositiveGrading { s: u32 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(Dim, Dim),
    #[error(transparent)]
    Lie(#[from] LieError),
}

type NfResult<T> = Result<T, NormalFormError>;

/// Degree grading `mu + 2k` (`mu` in 2D).
pub fn grade_delta0(e: &OrbitElement) -> u32 {
    e.grade_delta0()
}

/// `2(mu + nu1 l)`; `N` has grade `2 nu1`.
pub fn grade_2d(e: &OrbitElement, nu1: u32) -> i64 {
    2 * (i64::from(e.mu) + i64::from(nu1) * i64::from(e.l))
}

/// `(r+1)(mu+2k) + (l-mu)(r+2s)`; `N` has grade `r + 2s`.
pub fn grade_3d(e: &OrbitElement, r: u32, s: u32) -> i64 {
    let (r, s) = (i64::from(r), i64::from(s));
    let (mu, k, l) = (i64::from(e.mu), i64::from(e.k), i64::from(e.l));
    (r + 1) * (mu + 2 * k) + (l - mu) * (r + 2 * s)
}

/// Weighted grading attached to a leading term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grading {
    Two { nu1: u32 },
    Three { r: u32, s: u32 },
}

impl Grading {
    pub fn grade(&self, e: &OrbitElement) -> i64 {
        match *self {
            Grading::Two { nu1 } => grade_2d(e, nu1),
            Grading::Three { r, s } => grade_3d(e, r, s),
        }
    }

    pub fn n_grade(&self) -> i64 {
        match *self {
            Grading::Two { nu1 } => 2 * i64::from(nu1),
            Grading::Three { r, s } => i64::from(r + 2 * s),
        }
    }
}

/// `exp(ad_T) v` truncated at degree `max_grade`.
///
/// Removing `c A^l` takes `T` containing `c A^(l-1)`, since
/// `[A^(l-1), N] = -A^l`.
pub fn apply_transform<C: Coefficient>(
    v: &LieComb<C>,
    t: &LieComb<C>,
    max_grade: u32,
) -> NfResult<LieComb<C>> {
    check_generator(t)?;
    let mut result = v.truncate(max_grade);
    let mut term = result.clone();
    let mut j = 1i64;
    loop {
        term = comb_bracket_truncated(t, &term, max_grade)?.scale(&Rational::new(1, j));
        if term.is_zero() {
            break;
        }
        result = result.add(&term);
        j += 1;
    }
    Ok(result)
}

fn check_generator<C: Coefficient>(t: &LieComb<C>) -> NfResult<()> {
    if t.has_n() {
        return Err(NormalFormError::GeneratorWithN);
    }
    if let Some((e, _)) = t.terms().find(|(e, _)| e.grade_delta0() == 0) {
        return Err(NormalFormError::GradingViolation(*e));
    }
    Ok(())
}

/// Applies `generators` one after another.
pub fn replay<C: Coefficient>(
    input: &LieComb<C>,
    generators: &[LieComb<C>],
    max_grade: u32,
) -> NfResult<LieComb<C>> {
    let mut v = input.truncate(max_grade);
    for t in generators {
        v = apply_transform(&v, t, max_grade)?;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NFProblem {
    pub dim: Dim,
    pub input: LieComb<ParamPoly>,
    pub max_grade: u32,
    pub mode: Mode,
}

impl NFProblem {
    pub fn new(input: LieComb<ParamPoly>, max_grade: u32, mode: Mode) -> Self {
        NFProblem {
            dim: input.dim(),
            input,
            max_grade,
            mode,
        }
    }

    pub fn validate(&self) -> NfResult<()> {
        if self.input.dim() != self.dim {
            return Err(NormalFormError::DimensionMismatch(
                self.dim,
                self.input.dim(),
            ));
        }
        if !self.input.has_n() {
            return Err(NormalFormError::MissingNilpotent);
        }
        for (e, c) in self.input.terms() {
            if e.grade_delta0() == 0 {
                return Err(NormalFormError::GradingViolation(*e));
            }
            if self.mode == Mode::Numeric && !c.is_constant() {
                return Err(NormalFormError::NotNumeric(*e, c.to_string()));
            }
        }
        Ok(())
    }

    fn numeric_input(&self) -> NfResult<LieComb<Rational>> {
        self.input
            .to_numeric()
            .ok_or(NormalFormError::RequiresNumeric)
    }
}

/// Lowest terms of a first-level form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadingData {
    /// For each delta power `s` present, the smallest `mu` with a nonzero
    /// `A^0_{mu,s}` (2D uses `s = 0` only).
    pub per_power: BTreeMap<u32, u32>,
    /// `A^0_{nu1}` in 2D, `A^0_{r_s,s}` with the smallest `s` in 3D.
    pub first: Option<OrbitElement>,
    /// The next term after `first` in its grading.
    pub second: Option<OrbitElement>,
}

/// Reads off the leading indices from the `A^0` terms of `v`.
///
/// Returns `None` when `v` has no nonzero `A^0` term.
pub fn detect_leading<C: Coefficient>(v: &LieComb<C>) -> Option<LeadingData> {
    let kernel: Vec<OrbitElement> = v
        .terms()
        .filter(|(e, _)| e.l == 0)
        .map(|(e, _)| *e)
        .collect();
    if kernel.is_empty() {
        return None;
    }
    let mut per_power = BTreeMap::new();
    for e in &kernel {
        per_power
            .entry(e.k)
            .and_modify(|m: &mut u32| *m = (*m).min(e.mu))
            .or_insert(e.mu);
    }
    let (&s, &r) = per_power.iter().next().expect("nonempty");
    let first = OrbitElement::new(v.dim(), 0, r, s);
    let grading = match v.dim() {
        Dim::Two => Grading::Two { nu1: r },
        Dim::Three => Grading::Three { r, s },
    };
    let second = kernel
        .iter()
        .filter(|e| **e != first)
        .min_by_key(|e| (grading.grade(e), e.k, e.mu))
        .copied();
    Some(LeadingData {
        per_power,
        first: Some(first),
        second,
    })
}

/// One recorded transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub level: u8,
    /// Grade of the generator: degree at level 1, weighted grade above.
    pub grade: i64,
    pub generator: LieComb<ParamPoly>,
}

/// An `A^0` slot that a level clears.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedSlot {
    pub level: u8,
    pub grade: i64,
    pub slot: OrbitElement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NFReport {
    pub dim: Dim,
    pub max_grade: u32,
    pub mode: Mode,
    pub input: LieComb<ParamPoly>,
    pub level1: Option<LieComb<ParamPoly>>,
    pub level2: Option<LieComb<ParamPoly>>,
    pub level3: Option<LieComb<ParamPoly>>,
    pub generators: Vec<GeneratorRecord>,
    pub leading: Option<LeadingData>,
    pub grading: Option<Grading>,
    pub removed_slots: Vec<RemovedSlot>,
    /// Kernel generators (with their chains) that commute with the leading
    /// part up to truncation; level 3 uses them.
    pub symmetries: Vec<GeneratorRecord>,
}

impl NFReport {
    fn empty(p: &NFProblem) -> Self {
        NFReport {
            dim: p.dim,
            max_grade: p.max_grade,
            mode: p.mode,
            input: p.input.truncate(p.max_grade),
            level1: None,
            level2: None,
            level3: None,
            generators: Vec::new(),
            leading: None,
            grading: None,
            removed_slots: Vec::new(),
            symmetries: Vec::new(),
        }
    }

    pub fn generators_of(&self, level: u8) -> Vec<LieComb<ParamPoly>> {
        self.generators
            .iter()
            .filter(|g| g.level == level)
            .map(|g| g.generator.clone())
            .collect()
    }

    /// Input of a level: the problem input for level 1, the previous
    /// level's result otherwise.
    pub fn level_input(&self, level: u8) -> Option<&LieComb<ParamPoly>> {
        match level {
            1 => Some(&self.input),
            2 => self.level1.as_ref(),
            3 => self.level2.as_ref(),
            _ => None,
        }
    }

    pub fn level_output(&self, level: u8) -> Option<&LieComb<ParamPoly>> {
        match level {
            1 => self.level1.as_ref(),
            2 => self.level2.as_ref(),
            3 => self.level3.as_ref(),
            _ => None,
        }
    }

    /// The deepest level computed so far.
    pub fn result(&self) -> Option<&LieComb<ParamPoly>> {
        self.level3
            .as_ref()
            .or(self.level2.as_ref())
            .or(self.level1.as_ref())
    }
}

/// Runs level 1, and levels 2 and 3 in numeric mode.
pub fn normal_form(p: &NFProblem) -> NfResult<NFReport> {
    let report = first_level(p)?;
    if p.mode == Mode::Symbolic {
        return Ok(report);
    }
    let report = second_level(p, report)?;
    third_level(p, report)
}

/// Clears every `A^l` with `l >= 1`, one degree at a time.
pub fn first_level(p: &NFProblem) -> NfResult<NFReport> {
    p.validate()?;
    let mut report = NFReport::empty(p);
    let (out, gens) = match p.mode {
        Mode::Symbolic => first_level_generic(&p.input, p.max_grade)?,
        Mode::Numeric => {
            let (out, gens) = first_level_generic(&p.numeric_input()?, p.max_grade)?;
            (
                out.lift(),
                gens.into_iter().map(|(d, t)| (d, t.lift())).collect(),
            )
        }
    };
    report
        .generators
        .extend(gens.into_iter().map(|(d, t)| GeneratorRecord {
            level: 1,
            grade: i64::from(d),
            generator: t,
        }));
    report.leading = detect_leading(&out);
    report.level1 = Some(out);
    Ok(report)
}

/// The reduced field and the generator used at each degree.
type LevelOne<C> = (LieComb<C>, Vec<(u32, LieComb<C>)>);

fn first_level_generic<C: Coefficient>(
    input: &LieComb<C>,
    max_grade: u32,
) -> NfResult<LevelOne<C>> {
    let mut v = input.truncate(max_grade);
    let mut gens = Vec::new();
    for d in 1..=max_grade {
        let mut t = LieComb::new(v.dim());
        for (e, c) in v.terms() {
            if e.grade_delta0() == d && e.l >= 1 {
                t.add_term(e.with_l(e.l - 1), c.clone());
            }
        }
        if t.is_empty() {
            continue;
        }
        v = apply_transform(&v, &t, max_grade)?;
        gens.push((d, t));
    }
    Ok((v, gens))
}

/// Result of [`solve_generator_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorChain {
    /// `T` with `[X, T] + A^n_{m,k} = residual`.
    pub generator: LieComb<Rational>,
    /// `alpha_0 .. alpha_n` along `A^(n-i-1)_{m+ir, k+is}`; `alpha_n` is
    /// minus the residual coefficient at `slot`.
    pub alphas: Vec<Rational>,
    pub slot: OrbitElement,
    /// The full `A^0` residual; in 3D it may also hold terms of higher
    /// delta power than `slot`.
    pub residual: LieComb<Rational>,
}

fn leading_term(x: &LieComb<Rational>) -> NfResult<(OrbitElement, Rational)> {
    let mut it = x.terms();
    match (x.has_n(), it.next(), it.next()) {
        (true, Some((e, a)), None) if e.l == 0 => Ok((*e, a.clone())),
        _ => Err(NormalFormError::InvalidLeading),
    }
}

/// Triangular elimination of `A^n_{m,k}` against `X = N + a A^0_{r,s}`.
pub fn solve_generator_chain(
    x: &LieComb<Rational>,
    target: OrbitElement,
) -> NfResult<GeneratorChain> {
    let (lead, a) = leading_term(x)?;
    if a.is_zero() {
        return Err(NormalFormError::InvalidLeading);
    }
    if target.dim != x.dim() {
        return Err(NormalFormError::DimensionMismatch(x.dim(), target.dim));
    }
    if target.l == 0 || !target.is_valid() {
        return Err(NormalFormError::InvalidTarget(target));
    }
    let n = target.l;
    let along = |i: u32| {
        OrbitElement::new(
            target.dim,
            n - i - 1,
            target.mu + i * lead.mu,
            target.k + i * lead.k,
        )
    };
    for i in 0..n {
        if along(i).grade_delta0() == lead.grade_delta0() {
            return Err(NormalFormError::DegenerateChain { step: i });
        }
    }
    let (t_elim, residual) = chain_reduce(x, LieComb::single(target, Rational::one()), u32::MAX)?;
    // [t_elim, X] + A^n = residual, so T = -t_elim gives [X, T] + A^n = residual.
    let generator = t_elim.scale(&-Rational::one());
    let slot = OrbitElement::new(
        target.dim,
        0,
        target.mu + n * lead.mu,
        target.k + n * lead.k,
    );
    let mut alphas: Vec<Rational> = (0..n).map(|i| generator.coeff(&along(i))).collect();
    alphas.push(-residual.coeff(&slot));
    Ok(GeneratorChain {
        generator,
        alphas,
        slot,
        residual,
    })
}

/// Cancels every non-`A^0` term of `w` with `[T, X]`, highest `l` first.
/// Returns `T` and the `A^0` remainder `w + [T, X]`.
fn chain_reduce(
    x: &LieComb<Rational>,
    mut w: LieComb<Rational>,
    max_grade: u32,
) -> NfResult<(LieComb<Rational>, LieComb<Rational>)> {
    let mut t = LieComb::new(w.dim());
    loop {
        let pick = w
            .terms()
            .filter(|(e, _)| e.l > 0)
            .max_by(|(a, _), (b, _)| (a.l, b.k, b.mu).cmp(&(b.l, a.k, a.mu)))
            .map(|(e, c)| (*e, c.clone()));
        let Some((e, c)) = pick else { break };
        let step = LieComb::single(e.with_l(e.l - 1), c);
        w = w.add(&comb_bracket_truncated(&step, x, max_grade)?);
        debug_assert!(w.coeff(&e).is_zero());
        t = t.add(&step);
    }
    Ok((t, w))
}

/// Slot key for the `A^0` echelon: lower delta power is the preferred pivot.
type SlotKey = (u32, u32);

fn slot_key(e: &OrbitElement) -> SlotKey {
    (e.k, e.mu)
}

fn to_sparse(w: &LieComb<Rational>) -> SparseVec<SlotKey> {
    w.terms().map(|(e, c)| (slot_key(e), c.clone())).collect()
}

fn combine(
    rows: &[LieComb<Rational>],
    combo: &BTreeMap<usize, Rational>,
    dim: Dim,
) -> LieComb<Rational> {
    combo
        .iter()
        .fold(LieComb::new(dim), |acc, (i, c)| acc.add(&rows[*i].scale(c)))
}

/// Everything in the weighted grading that does not depend on the field
/// beyond its leading part.
struct GradedContext {
    dim: Dim,
    grading: Grading,
    x_lead: LieComb<Rational>,
    max_grade: u32,
    /// Basis elements of positive degree up to `max_grade`, by weighted grade.
    by_grade: BTreeMap<i64, Vec<OrbitElement>>,
}

/// Kernel generators at one grade after chain completion.
struct KernelRows {
    /// `K + chain(K)` per kernel generator, in insertion order.
    tags: Vec<LieComb<Rational>>,
    /// Their `A^0` residuals.
    residuals: Vec<LieComb<Rational>>,
    /// Combinations with zero residual.
    symmetries: Vec<LieComb<Rational>>,
}

impl GradedContext {
    fn new(dim: Dim, lead: OrbitElement, a: Rational, max_grade: u32) -> NfResult<Self> {
        let grading = match dim {
            Dim::Two => Grading::Two { nu1: lead.mu },
            Dim::Three if lead.k == 0 => Grading::Three { r: lead.mu, s: 0 },
            Dim::Three => return Err(NormalFormError::NoPositiveGrading { s: lead.k }),
        };
        let mut x_lead = LieComb::single(lead, a);
        x_lead.set_n(true);
        let mut by_grade: BTreeMap<i64, Vec<OrbitElement>> = BTreeMap::new();
        for e in basis_up_to(dim, max_grade) {
            by_grade.entry(grading.grade(&e)).or_default().push(e);
        }
        Ok(GradedContext {
            dim,
            grading,
            x_lead,
            max_grade,
            by_grade,
        })
    }

    fn lead_grade(&self) -> i64 {
        self.grading.n_grade()
    }

    fn component(&self, v: &LieComb<Rational>, g: i64) -> LieComb<Rational> {
        v.nonlinear().filter(|e| self.grading.grade(e) == g)
    }

    fn chain_reduce(
        &self,
        w: LieComb<Rational>,
    ) -> NfResult<(LieComb<Rational>, LieComb<Rational>)> {
        chain_reduce(&self.x_lead, w, self.max_grade)
    }

    fn kernel_rows(&self, h: i64) -> NfResult<KernelRows> {
        let mut rows = KernelRows {
            tags: Vec::new(),
            residuals: Vec::new(),
            symmetries: Vec::new(),
        };
        let Some(elems) = self.by_grade.get(&h) else {
            return Ok(rows);
        };
        let mut ech: Echelon<SlotKey> = Echelon::new();
        for k in elems.iter().filter(|e| e.l == e.top()) {
            let kc = LieComb::single(*k, Rational::one());
            let image = comb_bracket_truncated(&kc, &self.x_lead, self.max_grade)?;
            let (chain, residual) = self.chain_reduce(image)?;
            let tag = kc.add(&chain);
            if let Insertion::Dependent(combo) = ech.insert(to_sparse(&residual)) {
                rows.symmetries
                    .push(tag.sub(&combine(&rows.tags, &combo, self.dim)));
            }
            rows.tags.push(tag);
            rows.residuals.push(residual);
        }
        Ok(rows)
    }

    fn upper_grades(&self) -> Vec<i64> {
        self.by_grade
            .keys()
            .copied()
            .filter(|g| *g > self.lead_grade())
            .collect()
    }
}

/// All valid basis elements with `1 <= mu + 2k <= max_grade`.
pub fn basis_up_to(dim: Dim, max_grade: u32) -> Vec<OrbitElement> {
    let mut out = Vec::new();
    for d in 1..=max_grade {
        let kmax = if dim == Dim::Three { d / 2 } else { 0 };
        for k in 0..=kmax {
            let e0 = OrbitElement::new(dim, 0, d - 2 * k, k);
            out.extend((0..=e0.top()).map(|l| e0.with_l(l)));
        }
    }
    out
}

fn numeric_level_input(report: &NFReport, level: u8) -> NfResult<LieComb<Rational>> {
    report
        .level_input(level)
        .ok_or(NormalFormError::LevelOrder(level - 1, level))?
        .to_numeric()
        .ok_or(NormalFormError::RequiresNumeric)
}

/// Sets up the weighted grading from the first-level result, or `None`
/// when there is no `A^0` term to lead.
fn graded_context(v: &LieComb<Rational>, max_grade: u32) -> NfResult<Option<GradedContext>> {
    let Some(leading) = detect_leading(v) else {
        return Ok(None);
    };
    let lead = leading.first.expect("set by detect_leading");
    GradedContext::new(v.dim(), lead, v.coeff(&lead), max_grade).map(Some)
}

fn record(report: &mut NFReport, level: u8, grade: i64, t: &LieComb<Rational>) {
    report.generators.push(GeneratorRecord {
        level,
        grade,
        generator: t.lift(),
    });
}

/// Removes the `A^0` slots reachable through kernel generators of `ad_N`.
pub fn second_level(p: &NFProblem, mut report: NFReport) -> NfResult<NFReport> {
    if p.mode != Mode::Numeric {
        return Err(NormalFormError::RequiresNumeric);
    }
    let mut v = numeric_level_input(&report, 2)?;
    let Some(ctx) = graded_context(&v, p.max_grade)? else {
        report.level2 = Some(v.lift());
        return Ok(report);
    };
    report.grading = Some(ctx.grading);
    for g in ctx.upper_grades() {
        let h = g - ctx.lead_grade();
        let rows = ctx.kernel_rows(h)?;
        for s in &rows.symmetries {
            report.symmetries.push(GeneratorRecord {
                level: 2,
                grade: h,
                generator: s.lift(),
            });
        }
        let (t_chain, w0) = ctx.chain_reduce(ctx.component(&v, g))?;
        let mut ech: Echelon<SlotKey> = Echelon::new();
        for r in &rows.residuals {
            if let Insertion::Pivot(key) = ech.insert(to_sparse(r)) {
                report.removed_slots.push(RemovedSlot {
                    level: 2,
                    grade: g,
                    slot: slot_element(ctx.dim, key),
                });
            }
        }
        let (_, combo) = ech.reduce(&to_sparse(&w0));
        let t = t_chain.sub(&combine(&rows.tags, &combo, ctx.dim));
        if !t.is_empty() {
            v = apply_transform(&v, &t, p.max_grade)?;
            record(&mut report, 2, h, &t);
        }
    }
    report.level2 = Some(v.lift());
    Ok(report)
}

fn slot_element(dim: Dim, (k, mu): SlotKey) -> OrbitElement {
    OrbitElement::new(dim, 0, mu, k)
}

/// Uses the symmetries of the leading part, bracketed with the next
/// nonzero homogeneous component `Y`, to clear further `A^0` slots.
pub fn third_level(p: &NFProblem, mut report: NFReport) -> NfResult<NFReport> {
    if p.mode != Mode::Numeric {
        return Err(NormalFormError::RequiresNumeric);
    }
    let mut v = numeric_level_input(&report, 3)?;
    let Some(ctx) = graded_context(&v, p.max_grade)? else {
        report.level3 = Some(v.lift());
        return Ok(report);
    };
    let upper = ctx.upper_grades();
    let Some(g_y) = upper
        .iter()
        .copied()
        .find(|g| !ctx.component(&v, *g).is_empty())
    else {
        report.level3 = Some(v.lift());
        return Ok(report);
    };
    let y = ctx.component(&v, g_y);
    if let Some(leading) = report.leading.as_mut() {
        leading.second = y.terms().map(|(e, _)| *e).min_by_key(slot_key);
    }
    let mut symmetry_cache: BTreeMap<i64, Vec<LieComb<Rational>>> = BTreeMap::new();
    let level2_pivots: BTreeSet<OrbitElement> = report
        .removed_slots
        .iter()
        .filter(|r| r.level == 2)
        .map(|r| r.slot)
        .collect();
    for g in upper.into_iter().filter(|g| *g > g_y) {
        let h = g - ctx.lead_grade();
        let h_sym = g - g_y;
        let kernel = ctx.kernel_rows(h)?;
        if let Entry::Vacant(slot) = symmetry_cache.entry(h_sym) {
            slot.insert(ctx.kernel_rows(h_sym)?.symmetries);
        }
        let syms = &symmetry_cache[&h_sym];

        let mut ech: Echelon<SlotKey> = Echelon::new();
        for r in &kernel.residuals {
            ech.insert(to_sparse(r));
        }
        if !syms.is_empty() {
            let n_kernel = kernel.residuals.len();
            for s in syms {
                let image = comb_bracket_truncated(s, &y, p.max_grade)?;
                let (_, residual) = ctx.chain_reduce(image)?;
                if let Insertion::Pivot(key) = ech.insert(to_sparse(&residual)) {
                    let slot = slot_element(ctx.dim, key);
                    if !level2_pivots.contains(&slot) {
                        report.removed_slots.push(RemovedSlot {
                            level: 3,
                            grade: g,
                            slot,
                        });
                    }
                }
            }
            let (_, w0) = ctx.chain_reduce(ctx.component(&v, g))?;
            let (_, combo) = ech.reduce(&to_sparse(&w0));
            let sym_combo: BTreeMap<usize, Rational> = combo
                .iter()
                .filter(|(i, _)| **i >= n_kernel)
                .map(|(i, c)| (i - n_kernel, c.clone()))
                .collect();
            if !sym_combo.is_empty() {
                let t_sym = combine(syms, &sym_combo, ctx.dim).scale(&-Rational::one());
                v = apply_transform(&v, &t_sym, p.max_grade)?;
                record(&mut report, 3, h_sym, &t_sym);
            }
        }

        // Kernel rows and chains clean up this grade, including whatever
        // earlier level-3 transforms pushed into it.
        let (t_chain, w0) = ctx.chain_reduce(ctx.component(&v, g))?;
        let mut ech2: Echelon<SlotKey> = Echelon::new();
        for r in &kernel.residuals {
            ech2.insert(to_sparse(r));
        }
        let (_, combo2) = ech2.reduce(&to_sparse(&w0));
        let t = t_chain.sub(&combine(&kernel.tags, &combo2, ctx.dim));
        if !t.is_empty() {
            v = apply_transform(&v, &t, p.max_grade)?;
            record(&mut report, 3, h, &t);
        }
    }
    report.level3 = Some(v.lift());
    Ok(report)
}
