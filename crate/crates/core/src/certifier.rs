//! The certification pipeline: per non-identity group element, compose the
//! leading-term data into a matrix and a cone, check the composition
//! hypotheses and the disjointness from the positive part, and accumulate
//! the final cone.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::geometry::{
    hull, is_pointed, kernel_meets_trivially, shifted_cone_witness, shifted_region_witness, Cone, IVec,
    LeadingMatrix, Region, DIM,
};
use crate::ordering::{
    add, admissible_choices, collect_polynomials, realize_order_with, sub, Factor, LeadingTermChoice,
    PolynomialPool, WeightOrder,
};
use crate::stepmodel::StepSet;
use crate::walkgroup::{
    close_group, orbit_sum, GroupElement, GroupResult, WalkGroupError, Word, DEFAULT_GROUP_CAP,
};

pub const SCHEMA: &str = "octant-certificate/1";

/// Default bound on the number of admissible leading-term choices tried.
pub const DEFAULT_MAX_CHOICES: usize = 4096;

/// What the shifted element cone must avoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisjointnessMode {
    /// `x >= 1, y >= 1, z >= 1, t >= 0`.
    #[default]
    Positivity,
    /// The base cone itself.
    PaperCone,
}

impl fmt::Display for DisjointnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DisjointnessMode::Positivity => "positivity",
            DisjointnessMode::PaperCone => "paper-cone",
        })
    }
}

impl FromStr for DisjointnessMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "positivity" => Ok(DisjointnessMode::Positivity),
            "paper-cone" => Ok(DisjointnessMode::PaperCone),
            _ => Err(format!("unknown mode {s:?} (expected positivity or paper-cone)")),
        }
    }
}

/// Optional stricter dimensionality filter; `true` keeps the model.
pub type ModelFilter = fn(&StepSet) -> bool;

#[derive(Debug, Clone, Copy)]
pub struct CertifyConfig {
    pub group_cap: usize,
    pub mode: DisjointnessMode,
    /// Stop at a zero orbit sum before searching for leading terms.
    pub zero_orbit_sum_gate: bool,
    pub max_choices: usize,
    pub extra_filter: Option<ModelFilter>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            group_cap: DEFAULT_GROUP_CAP,
            mode: DisjointnessMode::Positivity,
            zero_orbit_sum_gate: true,
            max_choices: DEFAULT_MAX_CHOICES,
            extra_filter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    CertifiedDFinite,
    ZeroOrbitSum,
    GroupCapExceeded,
    LowerDimensional,
    ParityConflict,
    Obstructed(Word),
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::CertifiedDFinite => "CertifiedDFinite",
            Verdict::ZeroOrbitSum => "ZeroOrbitSum",
            Verdict::GroupCapExceeded => "GroupCapExceeded",
            Verdict::LowerDimensional => "LowerDimensional",
            Verdict::ParityConflict => "ParityConflict",
            Verdict::Obstructed(_) => "Obstructed",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::CertifiedDFinite => 0,
            Verdict::ZeroOrbitSum => 2,
            Verdict::GroupCapExceeded | Verdict::LowerDimensional | Verdict::ParityConflict => 3,
            Verdict::Obstructed(_) | Verdict::Inconclusive => 4,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Obstructed(w) => write!(f, "Obstructed({w})"),
            v => f.write_str(v.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementReport {
    pub word: Word,
    pub sign: i8,
    pub matrix: LeadingMatrix,
    pub cone: Cone,
    pub shift: IVec,
    pub kernel_trivial: bool,
    pub hull_pointed: bool,
    pub disjoint: bool,
    /// A rational point of the shifted cone inside the avoided set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[String; DIM]>,
}

impl ElementReport {
    pub fn passes(&self) -> bool {
        self.kernel_trivial && self.hull_pointed && self.disjoint
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub model: StepSet,
    pub steps: String,
    pub group_cap: usize,
    pub mode: DisjointnessMode,
    pub zero_orbit_sum_gate: bool,
    pub group_order: Option<usize>,
    pub zero_orbit_sum: Option<bool>,
    /// Normalized pool polynomials, in choice order.
    pub pool: Vec<String>,
    /// Position of `choice` in the lexicographic product of pool supports.
    pub choice_index: Option<u128>,
    pub choice: Option<Vec<IVec>>,
    pub weight: Option<WeightOrder>,
    pub base_cone: Cone,
    pub elements: Vec<ElementReport>,
    pub final_cone: Option<Cone>,
    pub final_cone_pointed: Option<bool>,
    pub choices_tried: usize,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("polynomial {0} is not in the pool")]
    UnpooledPolynomial(String),
}

/// `C = <(1,0,0,1), (0,1,0,1), (0,0,1,1), (0,0,0,1), (1,1,0,1), (1,0,1,1), (0,1,1,1), (1,1,1,1)>`.
pub fn base_cone() -> Cone {
    Cone::new([
        [1, 0, 0, 1],
        [0, 1, 0, 1],
        [0, 0, 1, 1],
        [0, 0, 0, 1],
        [1, 1, 0, 1],
        [1, 0, 1, 1],
        [0, 1, 1, 1],
        [1, 1, 1, 1],
    ])
}

/// Leading-term data of one element: numerator and denominator of each
/// coordinate image relative to the pool.
#[derive(Debug, Clone)]
struct ElementData {
    factors: [(Factor, Factor); 3],
    entries: Vec<usize>,
}

impl ElementData {
    fn new(g: &GroupElement, pool: &PolynomialPool) -> Result<Self, CertifyError> {
        let locate = |p| {
            pool.factor(p)
                .ok_or_else(|| CertifyError::UnpooledPolynomial(p.to_string()))
        };
        let mut factors = [(Factor::Monomial([0; DIM]), Factor::Monomial([0; DIM])); 3];
        let mut entries = Vec::new();
        for (slot, f) in factors.iter_mut().zip(&g.map.images) {
            *slot = (locate(f.num())?, locate(f.den())?);
            for fac in [slot.0, slot.1] {
                if let Factor::Pooled { entry, .. } = fac {
                    entries.push(entry);
                }
            }
        }
        entries.sort_unstable();
        entries.dedup();
        Ok(ElementData { factors, entries })
    }

    fn matrix(&self, pool: &PolynomialPool, choice: &LeadingTermChoice) -> LeadingMatrix {
        let lexp = |f: Factor| match f {
            Factor::Monomial(e) => e,
            Factor::Pooled { shift, entry } => add(&shift, &choice.lexp(pool, entry)),
        };
        let mut columns = [[0; DIM]; DIM];
        for (col, (n, d)) in columns.iter_mut().zip(self.factors) {
            *col = sub(&lexp(n), &lexp(d));
        }
        columns[3] = [0, 0, 0, 1];
        LeadingMatrix { columns }
    }

    fn cone(&self, pool: &PolynomialPool, choice: &LeadingTermChoice, m: &LeadingMatrix, base: &Cone) -> Cone {
        let mut gens: Vec<IVec> = base.generators().iter().map(|c| m.apply(c)).collect();
        for &entry in &self.entries {
            let lt = choice.lexp(pool, entry);
            gens.extend(pool.entries[entry].support.iter().map(|s| sub(s, &lt)));
        }
        Cone::new(gens)
    }

    fn report(
        &self,
        g: &GroupElement,
        pool: &PolynomialPool,
        choice: &LeadingTermChoice,
        base: &Cone,
        mode: DisjointnessMode,
    ) -> ElementReport {
        let matrix = self.matrix(pool, choice);
        let cone = self.cone(pool, choice, &matrix, base);
        let c = &matrix.columns;
        let shift = add(&add(&c[0], &c[1]), &c[2]);
        let kernel_trivial = kernel_meets_trivially(base, &matrix);
        let hull_pointed = is_pointed(&hull(base, &cone));
        let witness = match mode {
            DisjointnessMode::Positivity => shifted_region_witness(&shift, &cone, &Region::positivity()),
            DisjointnessMode::PaperCone => shifted_cone_witness(&shift, &cone, base),
        };
        ElementReport {
            word: g.word.clone(),
            sign: g.sign,
            matrix,
            cone,
            shift,
            kernel_trivial,
            hull_pointed,
            disjoint: witness.is_none(),
            witness: witness.map(|p| p.map(|q| q.to_string())),
        }
    }
}

/// The matrix whose columns are the leading exponents of `g`'s images, with
/// `t` fixed.
pub fn element_matrix(
    g: &GroupElement,
    pool: &PolynomialPool,
    choice: &LeadingTermChoice,
) -> Result<LeadingMatrix, CertifyError> {
    Ok(ElementData::new(g, pool)?.matrix(pool, choice))
}

/// `M C` together with the support differences of every polynomial in `g`.
pub fn element_cone(
    g: &GroupElement,
    pool: &PolynomialPool,
    choice: &LeadingTermChoice,
    base: &Cone,
) -> Result<Cone, CertifyError> {
    let data = ElementData::new(g, pool)?;
    let m = data.matrix(pool, choice);
    Ok(data.cone(pool, choice, &m, base))
}

pub fn check_element(
    g: &GroupElement,
    pool: &PolynomialPool,
    choice: &LeadingTermChoice,
    base: &Cone,
    mode: DisjointnessMode,
) -> Result<ElementReport, CertifyError> {
    Ok(ElementData::new(g, pool)?.report(g, pool, choice, base, mode))
}

fn skeleton(s: &StepSet, config: &CertifyConfig, verdict: Verdict) -> Certificate {
    Certificate {
        schema: SCHEMA.to_string(),
        model: *s,
        steps: s.to_string(),
        group_cap: config.group_cap,
        mode: config.mode,
        zero_orbit_sum_gate: config.zero_orbit_sum_gate,
        group_order: None,
        zero_orbit_sum: None,
        pool: Vec::new(),
        choice_index: None,
        choice: None,
        weight: None,
        base_cone: base_cone(),
        elements: Vec::new(),
        final_cone: None,
        final_cone_pointed: None,
        choices_tried: 0,
        verdict,
    }
}

/// Outcome of group construction, shared by certification and verification.
enum GroupStage {
    Done(Verdict),
    Finite(GroupResult),
}

fn group_stage(s: &StepSet, config: &CertifyConfig) -> GroupStage {
    if !s.axis_usage().all_bidirectional() || config.extra_filter.is_some_and(|f| !f(s)) {
        return GroupStage::Done(Verdict::LowerDimensional);
    }
    match close_group(s, config.group_cap) {
        Ok(g) if g.is_finite() => GroupStage::Finite(g),
        Ok(_) => GroupStage::Done(Verdict::GroupCapExceeded),
        Err(WalkGroupError::ParityConflict { .. }) => GroupStage::Done(Verdict::ParityConflict),
        Err(WalkGroupError::GeneratorUndefined(_)) => GroupStage::Done(Verdict::LowerDimensional),
        Err(e) => panic!("group construction failed for {}: {e}", s.hex_id()),
    }
}

struct Search<'a> {
    group: &'a GroupResult,
    pool: &'a PolynomialPool,
    base: &'a Cone,
    mode: DisjointnessMode,
    data: Vec<ElementData>,
    cache: HashMap<(usize, Vec<usize>), ElementReport>,
}

impl<'a> Search<'a> {
    fn reports(&mut self, choice: &LeadingTermChoice) -> Vec<ElementReport> {
        let mut out = Vec::with_capacity(self.data.len());
        for (i, d) in self.data.iter().enumerate() {
            let key = (i, d.entries.iter().map(|&e| choice.indices[e]).collect());
            let r = self.cache.entry(key).or_insert_with(|| {
                d.report(&self.group.elements[i + 1], self.pool, choice, self.base, self.mode)
            });
            out.push(r.clone());
        }
        out
    }
}

fn final_cone(base: &Cone, reports: &[ElementReport]) -> Cone {
    Cone::new(
        base.generators()
            .iter()
            .chain(reports.iter().flat_map(|r| r.cone.generators()))
            .copied(),
    )
}

fn nonneg_on(w: &WeightOrder, c: &Cone) -> bool {
    c.generators().iter().all(|b| w.weight(b) >= BigRational::zero())
}

/// Run the full pipeline on one model. Every failure is a verdict.
pub fn certify(s: &StepSet, config: &CertifyConfig) -> Certificate {
    let group = match group_stage(s, config) {
        GroupStage::Done(v) => return skeleton(s, config, v),
        GroupStage::Finite(g) => g,
    };
    let mut cert = skeleton(s, config, Verdict::Inconclusive);
    cert.group_order = Some(group.order);
    let os = orbit_sum(&group);
    cert.zero_orbit_sum = Some(os.is_zero);
    if os.is_zero && config.zero_orbit_sum_gate {
        cert.verdict = Verdict::ZeroOrbitSum;
        return cert;
    }

    let pool = collect_polynomials(&group);
    cert.pool = pool.polys().map(|p| p.to_string()).collect();
    let base = base_cone();
    let data = group
        .non_identity()
        .map(|g| ElementData::new(g, &pool).expect("pool covers every element"))
        .collect();
    let mut search = Search {
        group: &group,
        pool: &pool,
        base: &base,
        mode: config.mode,
        data,
        cache: HashMap::new(),
    };

    let n = group.order - 1;
    let mut ever_disjoint = vec![false; n];
    let mut shown: Option<(LeadingTermChoice, WeightOrder, Vec<ElementReport>, Cone, bool)> = None;
    let mut truncated = false;
    let mut tried = 0;
    for (choice, w) in admissible_choices(&pool, &base) {
        if tried == config.max_choices {
            truncated = true;
            break;
        }
        tried += 1;
        let reports = search.reports(&choice);
        for (i, r) in reports.iter().enumerate() {
            ever_disjoint[i] |= r.disjoint;
        }
        let all_pass = reports.iter().all(ElementReport::passes);
        let b = final_cone(&base, &reports);
        if all_pass {
            let pointed = is_pointed(&b);
            let weight = if !pointed {
                None
            } else if nonneg_on(&w, &b) {
                Some(w.clone())
            } else {
                realize_order_with(&pool, &choice, &base, b.generators())
            };
            if let Some(weight) = weight {
                cert.choices_tried = tried;
                fill_choice(&mut cert, &pool, &choice, weight, reports, b, true);
                cert.verdict = Verdict::CertifiedDFinite;
                return cert;
            }
        }
        if shown.is_none() {
            let pointed = is_pointed(&b);
            shown = Some((choice, w, reports, b, pointed));
        }
    }
    cert.choices_tried = tried;
    if let Some((choice, w, reports, b, pointed)) = shown {
        fill_choice(&mut cert, &pool, &choice, w, reports, b, pointed);
    }
    if !truncated && tried > 0 {
        if let Some(i) = ever_disjoint.iter().position(|&d| !d) {
            cert.verdict = Verdict::Obstructed(group.elements[i + 1].word.clone());
        }
    }
    cert
}

fn fill_choice(
    cert: &mut Certificate,
    pool: &PolynomialPool,
    choice: &LeadingTermChoice,
    weight: WeightOrder,
    reports: Vec<ElementReport>,
    b: Cone,
    pointed: bool,
) {
    cert.choice_index = Some(choice.rank(pool));
    cert.choice = Some(choice.exponents(pool));
    cert.weight = Some(weight);
    cert.elements = reports;
    cert.final_cone = Some(b);
    cert.final_cone_pointed = Some(pointed);
}

/// First mismatch found while re-checking a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {detail}")]
pub struct VerifyError {
    pub path: String,
    pub detail: String,
}

fn mismatch(path: impl Into<String>, detail: impl Into<String>) -> VerifyError {
    VerifyError {
        path: path.into(),
        detail: detail.into(),
    }
}

fn expect_eq<T: PartialEq + fmt::Debug>(path: &str, stored: &T, recomputed: &T) -> Result<(), VerifyError> {
    if stored == recomputed {
        Ok(())
    } else {
        Err(mismatch(path, format!("stored {stored:?}, recomputed {recomputed:?}")))
    }
}

/// Path of the first difference between two JSON values.
pub fn first_difference(a: &Value, b: &Value, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, va) in x {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match y.get(k) {
                    Some(vb) => {
                        if let Some(d) = first_difference(va, vb, &p) {
                            return Some(d);
                        }
                    }
                    None => return Some(p),
                }
            }
            y.keys()
                .find(|k| !x.contains_key(*k))
                .map(|k| if path.is_empty() { k.clone() } else { format!("{path}.{k}") })
        }
        (Value::Array(x), Value::Array(y)) => {
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                if let Some(d) = first_difference(va, vb, &format!("{path}[{i}]")) {
                    return Some(d);
                }
            }
            (x.len() != y.len()).then(|| format!("{path}.length"))
        }
        _ => (a != b).then(|| path.to_string()),
    }
}

/// Re-check a certificate from the model alone.
///
/// Certified verdicts are re-verified without search: the stored choice and
/// weight are checked by substitution and every matrix, cone, check and the
/// final cone are recomputed. Other verdicts are reproduced by rerunning the
/// pipeline with the recorded configuration.
pub fn verify_certificate(cert: &Certificate) -> Result<(), VerifyError> {
    expect_eq("schema", &cert.schema.as_str(), &SCHEMA)?;
    let parsed: StepSet = cert
        .steps
        .parse()
        .map_err(|e| mismatch("steps", format!("unparseable: {e}")))?;
    expect_eq("steps", &parsed, &cert.model)?;
    expect_eq("base_cone", &cert.base_cone, &base_cone())?;
    let config = CertifyConfig {
        group_cap: cert.group_cap,
        mode: cert.mode,
        zero_orbit_sum_gate: cert.zero_orbit_sum_gate,
        ..CertifyConfig::default()
    };
    if cert.verdict != Verdict::CertifiedDFinite {
        let fresh = certify(&cert.model, &CertifyConfig {
            max_choices: cert.choices_tried.max(config.max_choices),
            ..config
        });
        let a = serde_json::to_value(cert).expect("serializes");
        let b = serde_json::to_value(&fresh).expect("serializes");
        return match first_difference(&a, &b, "") {
            None => Ok(()),
            Some(p) => Err(mismatch(p, "differs from a fresh run")),
        };
    }

    let group = match group_stage(&cert.model, &config) {
        GroupStage::Done(v) => return Err(mismatch("verdict", format!("model yields {v}"))),
        GroupStage::Finite(g) => g,
    };
    expect_eq("group_order", &cert.group_order, &Some(group.order))?;
    let os = orbit_sum(&group);
    expect_eq("zero_orbit_sum", &cert.zero_orbit_sum, &Some(os.is_zero))?;
    if os.is_zero {
        return Err(mismatch("zero_orbit_sum", "certified model has zero orbit sum"));
    }
    let pool = collect_polynomials(&group);
    let printed: Vec<String> = pool.polys().map(|p| p.to_string()).collect();
    expect_eq("pool", &cert.pool, &printed)?;
    let exps = cert.choice.as_ref().ok_or_else(|| mismatch("choice", "missing"))?;
    let choice = LeadingTermChoice::from_exponents(&pool, exps)
        .ok_or_else(|| mismatch("choice", "not a choice of pool support exponents"))?;
    expect_eq("choice_index", &cert.choice_index, &Some(choice.rank(&pool)))?;
    let base = base_cone();
    let weight = cert.weight.as_ref().ok_or_else(|| mismatch("weight", "missing"))?;
    if !weight.satisfies(&pool, &choice, &base) {
        return Err(mismatch("weight", "violates a strict order inequality"));
    }
    expect_eq("elements.length", &cert.elements.len(), &(group.order - 1))?;
    for (i, (r, g)) in cert.elements.iter().zip(group.non_identity()).enumerate() {
        let p = |f: &str| format!("elements[{i}].{f}");
        let fresh = check_element(g, &pool, &choice, &base, cert.mode).map_err(|e| mismatch(p("word"), e.to_string()))?;
        expect_eq(&p("word"), &r.word, &fresh.word)?;
        expect_eq(&p("sign"), &r.sign, &fresh.sign)?;
        expect_eq(&p("matrix"), &r.matrix, &fresh.matrix)?;
        expect_eq(&p("cone"), &r.cone, &fresh.cone)?;
        expect_eq(&p("shift"), &r.shift, &fresh.shift)?;
        expect_eq(&p("kernel_trivial"), &r.kernel_trivial, &fresh.kernel_trivial)?;
        expect_eq(&p("hull_pointed"), &r.hull_pointed, &fresh.hull_pointed)?;
        expect_eq(&p("disjoint"), &r.disjoint, &fresh.disjoint)?;
        if !r.passes() {
            return Err(mismatch(p("disjoint"), "a failed check cannot be certified"));
        }
    }
    let b = cert.final_cone.as_ref().ok_or_else(|| mismatch("final_cone", "missing"))?;
    for (i, r) in cert.elements.iter().enumerate() {
        if let Some(g) = r.cone.generators().iter().find(|g| !b.contains_int(g)) {
            return Err(mismatch(
                "final_cone",
                format!("misses generator {g:?} of elements[{i}].cone"),
            ));
        }
    }
    if let Some(g) = base.generators().iter().find(|g| !b.contains_int(g)) {
        return Err(mismatch("final_cone", format!("misses base generator {g:?}")));
    }
    expect_eq("final_cone", b, &final_cone(&base, &cert.elements))?;
    if !is_pointed(b) || cert.final_cone_pointed != Some(true) {
        return Err(mismatch("final_cone_pointed", "final cone is not pointed"));
    }
    if !nonneg_on(weight, b) {
        return Err(mismatch("weight", "negative on the final cone"));
    }
    Ok(())
}
