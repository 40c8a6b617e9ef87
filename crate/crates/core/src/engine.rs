//! Top-level orchestration: the `galois_group` entry point, the tame
//! shortcut, parameterization parsing, and the simulated-oracle harness.
//!
//! A parameterization is a sequence of algorithms tried in turn:
//!
//! * `Tame` — the Galois group of a tame polynomial is known by theory:
//!   unramified extensions are cyclic (Frobenius), and a totally tamely
//!   ramified extension of degree `e` has the metacyclic closure
//!   `⟨i ↦ i+1, i ↦ q·i⟩` on `Z/e`.  Anything else falls through.
//! * `ARM` (abstract resolvent method) — build a global model for the
//!   polynomial, then run a deduction strategy over resolvent statistics
//!   with a tranche chooser.
//!
//! The named shorthands `A0`,`B0`,`A1`,`B1`,`A2`,`B2`,`00` expand to fixed
//! `Seq[Tame,ARM[…]]` trees.

use num_bigint::BigInt;

use crate::choice::{GroupShape, TrancheChooser, TrancheMode};
use crate::deduce::{Chooser, Deduction, MaximalPolicy, StrategyKind};
use crate::error::Error;
use crate::model::{build_model, GlobalModel, ModelConstructor, ModelOptions, SegmentChoice};
use crate::padic::{
    is_squarefree_q, lpoly_from_bigints, ramification_filtration, with_precision, SegmentKind,
};
use crate::perm::{direct_product, Perm, PermGroup};
use crate::resolvent::{primitive_invariant, resolvent_for_seeded};
use crate::stats::{eval_group, eval_poly, StatValue, Statistic};
use crate::Result;

/// Default cap on the polynomial degree.
pub const DEGREE_CAP: usize = 16;

/// Model constructor tree of the parameterization grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    /// Symmetric group model.
    Sym,
    /// Per-irreducible-factor models.
    Factors(Box<ModelSpec>),
    /// Ramification-tower model with the inner constructor per segment.
    RamTower(Box<ModelSpec>),
    /// RootOfUnity / RootOfUniformizer / Symmetric by segment kind.
    Select,
}

impl ModelSpec {
    fn options(&self) -> ModelOptions {
        fn has_select(m: &ModelSpec) -> bool {
            match m {
                ModelSpec::Select => true,
                ModelSpec::Factors(inner) | ModelSpec::RamTower(inner) => has_select(inner),
                ModelSpec::Sym => false,
            }
        }
        ModelOptions {
            choice: if has_select(self) {
                SegmentChoice::Select
            } else {
                SegmentChoice::Symmetric
            },
            ..ModelOptions::default()
        }
    }
}

/// Deduction strategy selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeduceSpec {
    All,
    Maximal,
    Maximal2,
}

impl DeduceSpec {
    fn kind(self) -> StrategyKind {
        match self {
            DeduceSpec::All => StrategyKind::All,
            DeduceSpec::Maximal => StrategyKind::Maximal(MaximalPolicy::default()),
            DeduceSpec::Maximal2 => StrategyKind::Maximal2,
        }
    }
}

/// Chooser selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChooseSpec {
    All,
    Index,
    /// `OrbitIndex[val<=k]`.
    OrbitIndex(u32),
}

impl ChooseSpec {
    fn mode(self, p: u64) -> TrancheMode {
        match self {
            ChooseSpec::All => TrancheMode::All,
            ChooseSpec::Index => TrancheMode::Index,
            ChooseSpec::OrbitIndex(k) => TrancheMode::OrbitIndex { p, max_val: Some(k) },
        }
    }
}

/// Parameters of one resolvent-method leg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArmParams {
    pub model: ModelSpec,
    pub deduce: DeduceSpec,
    pub stat: Statistic,
    pub choose: ChooseSpec,
}

/// One algorithm in a parameterization sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Tame,
    Arm(ArmParams),
}

/// A parsed parameterization: algorithms tried in turn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameterization {
    pub name: Option<String>,
    pub algorithms: Vec<Algorithm>,
}

/// The result of a Galois group computation.
#[derive(Clone, Debug)]
pub struct GaloisResult {
    /// The Galois group on the roots, up to conjugacy.
    pub group: PermGroup,
    /// Which algorithm produced the answer (`"Tame"` or `"ARM"`).
    pub algorithm: String,
    /// Model provenance, one line per factor.
    pub model_info: Vec<String>,
    /// Deduction trace, one line per resolvent.
    pub trace: Vec<String>,
    /// Degree of each resolvent evaluated.
    pub resolvent_degrees: Vec<usize>,
    /// The run seed all pseudorandom choices derive from.
    pub seed: u64,
}

/// Computes the Galois group of the squarefree monic polynomial `f`
/// (ascending integer coefficients) over `Q_p`.
pub fn galois_group(
    p: u64,
    f: &[BigInt],
    params: &Parameterization,
    seed: u64,
) -> Result<GaloisResult> {
    let degree = f.len().saturating_sub(1);
    if degree == 0 || f.last() != Some(&BigInt::from(1)) {
        return Err(Error::invalid("polynomial must be monic of positive degree"));
    }
    if degree > DEGREE_CAP {
        return Err(Error::cap(format!("degree {degree} exceeds the cap {DEGREE_CAP}")));
    }
    let rational: Vec<num_rational::BigRational> = f
        .iter()
        .map(|c| num_rational::BigRational::from(c.clone()))
        .collect();
    if !is_squarefree_q(&rational) {
        return Err(Error::invalid("polynomial must be squarefree"));
    }
    let mut last_err: Option<Error> = None;
    for alg in &params.algorithms {
        let attempt = match alg {
            Algorithm::Tame => tame_galois(p, f),
            Algorithm::Arm(arm) => arm_galois(p, f, arm, seed),
        };
        match attempt {
            Ok(mut result) => {
                result.seed = seed;
                return Ok(result);
            }
            Err(Error::NotApplicable(_)) => continue,
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Exhausted("no algorithm succeeded".into())))
}

/// Per-factor tame data: residue degree and (tame) ramification degree.
struct TameFactor {
    f: usize,
    e: usize,
    wild: bool,
}

/// The Galois group of a tame polynomial by theory, or `NotApplicable`.
///
/// Handled cases: every factor unramified (cyclic, generated by Frobenius
/// acting as one cycle per factor), and a single totally tamely ramified
/// factor (`⟨i ↦ i+1, i ↦ q·i⟩` on `Z/e`).
pub fn tame_galois(p: u64, f: &[BigInt]) -> Result<GaloisResult> {
    let factors: Vec<TameFactor> = with_precision(p, |qp| {
        let poly = lpoly_from_bigints(qp, f);
        let mut out = Vec::new();
        for g in crate::padic::factor_squarefree(qp, &poly)? {
            let (_, data) = ramification_filtration(qp, &g)?;
            let mut tf = TameFactor { f: 1, e: 1, wild: false };
            for (kind, deg) in data.kinds.iter().zip(&data.degrees) {
                match kind {
                    SegmentKind::Unramified => tf.f *= deg,
                    SegmentKind::Tame => tf.e *= deg,
                    SegmentKind::Wild => {
                        tf.e *= deg;
                        tf.wild = true;
                    }
                }
            }
            out.push(tf);
        }
        Ok(out)
    })?;
    if factors.iter().any(|t| t.wild) {
        return Err(Error::NotApplicable("wild ramification".into()));
    }
    if factors.iter().all(|t| t.e == 1) {
        // Unramified: cyclic, Frobenius acts as a product of one
        // f_i-cycle per factor.
        let degree: usize = factors.iter().map(|t| t.f).sum();
        let mut images: Vec<u16> = (0..degree as u16).collect();
        let mut offset = 0usize;
        for t in &factors {
            for i in 0..t.f {
                images[offset + i] = (offset + (i + 1) % t.f) as u16;
            }
            offset += t.f;
        }
        let group = PermGroup::new(degree, vec![Perm::from_images(images)?])?;
        return Ok(GaloisResult {
            group,
            algorithm: "Tame".into(),
            model_info: vec![format!("unramified factors of degrees {:?}", factors.iter().map(|t| t.f).collect::<Vec<_>>())],
            trace: Vec::new(),
            resolvent_degrees: Vec::new(),
            seed: 0,
        });
    }
    if factors.len() == 1 && factors[0].f == 1 {
        // Single totally tamely ramified factor of degree e.
        let e = factors[0].e;
        let q = (p % e as u64) as usize;
        let add: Vec<u16> = (0..e).map(|i| ((i + 1) % e) as u16).collect();
        let mul: Vec<u16> = (0..e).map(|i| ((i * q) % e) as u16).collect();
        let group = PermGroup::new(
            e,
            vec![Perm::from_images(add)?, Perm::from_images(mul)?],
        )?;
        return Ok(GaloisResult {
            group,
            algorithm: "Tame".into(),
            model_info: vec![format!("totally tamely ramified of degree {e}, q = {q}")],
            trace: Vec::new(),
            resolvent_degrees: Vec::new(),
            seed: 0,
        });
    }
    Err(Error::NotApplicable(
        "tame compositum not handled directly".into(),
    ))
}

/// The shape of the model's overgroup, mirroring its construction: a
/// direct product over factors of iterated wreath products over segments.
pub fn model_shape(m: &GlobalModel) -> GroupShape {
    let mut factors = Vec::with_capacity(m.factors.len());
    for fm in &m.factors {
        if fm.segments.is_empty() {
            factors.push(GroupShape::Explicit(fm.w.clone()));
            continue;
        }
        // Innermost wreath factor = topmost segment (they were folded in
        // reverse segment order).
        let shapes: Vec<GroupShape> = fm
            .segments
            .iter()
            .rev()
            .map(|seg| match seg.constructor {
                ModelConstructor::Symmetric => GroupShape::Symmetric(seg.degree),
                _ => GroupShape::Explicit(seg.group.clone()),
            })
            .collect();
        factors.push(GroupShape::Wreath(shapes));
    }
    GroupShape::Direct(factors)
}

/// Runs one resolvent-method leg.
fn arm_galois(p: u64, f: &[BigInt], arm: &ArmParams, seed: u64) -> Result<GaloisResult> {
    let model = build_model(p, f, &arm.model.options())?;
    let shape = model_shape(&model);
    debug_assert_eq!(
        shape.group().element_key(),
        model.w.element_key(),
        "model shape must reproduce the overgroup exactly"
    );
    let w = model.w.clone();
    let mut model_info = Vec::new();
    for (i, fm) in model.factors.iter().enumerate() {
        let segs: Vec<String> = fm
            .segments
            .iter()
            .map(|s| format!("{:?}×{} ({:?})", s.kind, s.degree, s.constructor))
            .collect();
        model_info.push(format!("factor {i}: degree {}, segments [{}]", fm.w.degree(), segs.join(", ")));
    }
    let mut resolvent_degrees = Vec::new();
    let mut resolve = |u: &PermGroup| -> Result<StatValue> {
        let inv = primitive_invariant(&w, u)?;
        let r = resolvent_for_seeded(&model, u, &inv, seed)?;
        resolvent_degrees.push(r.degree);
        with_precision(p, |k| eval_poly(&arm.stat, &r.coeffs, k))
    };
    let mut chooser = TrancheChooser::new(shape, &arm.choose.mode(p));
    let mut ded = match arm.deduce.kind() {
        StrategyKind::All => Deduction::new_all(&w, arm.stat.clone())?,
        StrategyKind::Maximal(policy) => Deduction::new_maximal(&w, arm.stat.clone(), policy)?,
        StrategyKind::Maximal2 => Deduction::new_maximal2(&w, arm.stat.clone())?,
    };
    let group = deduce_drive(&mut ded, &mut chooser, &mut resolve)?;
    Ok(GaloisResult {
        group,
        algorithm: "ARM".into(),
        model_info,
        trace: ded.trace().to_vec(),
        resolvent_degrees,
        seed,
    })
}

/// Drives a deduction with a chooser and resolver (thin wrapper over the
/// deduce module's loop, kept here so the trace can be retrieved).
fn deduce_drive<R>(
    ded: &mut Deduction,
    chooser: &mut dyn Chooser,
    resolve: &mut R,
) -> Result<PermGroup>
where
    R: FnMut(&PermGroup) -> Result<StatValue>,
{
    loop {
        if let Some(g) = ded.result()? {
            return Ok(g);
        }
        let Some(u) = chooser.next_u(ded)? else {
            return Err(Error::Exhausted(
                "chooser exhausted before the deduction completed".into(),
            ));
        };
        if !ded.useful(&u)? {
            continue;
        }
        let v = match resolve(&u) {
            Ok(v) => v,
            // A resolvent that cannot be evaluated or factored at any
            // affordable precision carries no information; move on.
            Err(Error::NotApplicable(_))
            | Err(Error::Exhausted(_))
            | Err(Error::CapExceeded(_)) => continue,
            Err(e) => return Err(e),
        };
        ded.step(&u, v)?;
    }
}

/// Runs a deduction strategy against the exact simulated oracle for a
/// hidden group `g ≤ shape.group()`: every statistic query is answered
/// with `eval_group(s, q_U(g))`.  Returns the answer and the query count.
pub fn simulated_run(
    shape: &GroupShape,
    g: &PermGroup,
    kind: StrategyKind,
    stat: &Statistic,
    mode: &TrancheMode,
) -> Result<(PermGroup, usize)> {
    let w = shape.group();
    let mut queries = 0usize;
    let mut resolve = |u: &PermGroup| -> Result<StatValue> {
        queries += 1;
        let act = crate::perm::CosetAction::new(&w, u)?;
        eval_group(stat, &act.image_of(g)?)
    };
    let mut chooser = TrancheChooser::new(shape.clone(), mode);
    let mut ded = match kind {
        StrategyKind::All => Deduction::new_all(&w, stat.clone())?,
        StrategyKind::Maximal(policy) => Deduction::new_maximal(&w, stat.clone(), policy)?,
        StrategyKind::Maximal2 => Deduction::new_maximal2(&w, stat.clone())?,
    };
    let answer = deduce_drive(&mut ded, &mut chooser, &mut resolve)?;
    Ok((answer, queries))
}

// ---------------------------------------------------------------------------
// Parameterization grammar.

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser { text, pos: 0 }
    }

    fn error(&self, msg: &str) -> Error {
        Error::invalid(format!("parameterization parse error at byte {}: {msg}", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn word(&mut self) -> Result<String> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.error("expected a name"));
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn bracket_list<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T>,
    ) -> Result<Vec<T>> {
        self.eat('[')?;
        let mut out = Vec::new();
        if self.peek() == Some(']') {
            self.eat(']')?;
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.peek() {
                Some(',') => self.eat(',')?,
                Some(']') => {
                    self.eat(']')?;
                    return Ok(out);
                }
                _ => return Err(self.error("expected ',' or ']'")),
            }
        }
    }

    fn algorithm(&mut self) -> Result<Algorithm> {
        let name = self.word()?;
        match name.as_str() {
            "Tame" => Ok(Algorithm::Tame),
            "ARM" => {
                let mut model = None;
                let mut deduce = None;
                let mut stat = None;
                let mut choose = None;
                let kvs = self.bracket_list(|p| {
                    let key = p.word()?;
                    p.eat('=')?;
                    Ok((key, p.pos))
                        .and_then(|(key, _)| match key.as_str() {
                            "model" => p.model_spec().map(Kv::Model),
                            "deduce" => p.deduce_spec().map(Kv::Deduce),
                            "stat" => p.statistic().map(Kv::Stat),
                            "choose" => p.choose_spec().map(Kv::Choose),
                            _ => Err(p.error("expected model=, deduce=, stat= or choose=")),
                        })
                })?;
                for kv in kvs {
                    match kv {
                        Kv::Model(m) => model = Some(m),
                        Kv::Deduce(d) => deduce = Some(d),
                        Kv::Stat(s) => stat = Some(s),
                        Kv::Choose(c) => choose = Some(c),
                    }
                }
                Ok(Algorithm::Arm(ArmParams {
                    model: model.ok_or_else(|| self.error("ARM needs model="))?,
                    deduce: deduce.ok_or_else(|| self.error("ARM needs deduce="))?,
                    stat: stat.ok_or_else(|| self.error("ARM needs stat="))?,
                    choose: choose.ok_or_else(|| self.error("ARM needs choose="))?,
                }))
            }
            _ => Err(self.error(&format!("unknown algorithm '{name}'"))),
        }
    }

    fn model_spec(&mut self) -> Result<ModelSpec> {
        let name = self.word()?;
        match name.as_str() {
            "Sym" => Ok(ModelSpec::Sym),
            "Factors" => {
                self.eat('[')?;
                let inner = self.model_spec()?;
                self.eat(']')?;
                Ok(ModelSpec::Factors(Box::new(inner)))
            }
            "RamTower" => {
                self.eat('[')?;
                let inner = self.model_spec()?;
                self.eat(']')?;
                Ok(ModelSpec::RamTower(Box::new(inner)))
            }
            "Select" => {
                let names = self.bracket_list(|p| p.word())?;
                if names != ["RootOfUnity", "RootOfUniformizer", "Sym"] {
                    return Err(self.error(
                        "Select takes exactly [RootOfUnity,RootOfUniformizer,Sym]",
                    ));
                }
                Ok(ModelSpec::Select)
            }
            _ => Err(self.error(&format!("unknown model '{name}'"))),
        }
    }

    fn deduce_spec(&mut self) -> Result<DeduceSpec> {
        let name = self.word()?;
        match name.as_str() {
            "All" => Ok(DeduceSpec::All),
            "Maximal" => Ok(DeduceSpec::Maximal),
            "Maximal2" => Ok(DeduceSpec::Maximal2),
            _ => Err(self.error(&format!("unknown deduction strategy '{name}'"))),
        }
    }

    fn choose_spec(&mut self) -> Result<ChooseSpec> {
        let name = self.word()?;
        match name.as_str() {
            "All" => Ok(ChooseSpec::All),
            "Index" => Ok(ChooseSpec::Index),
            "OrbitIndex" => {
                self.eat('[')?;
                let w = self.word()?;
                if w != "val" {
                    return Err(self.error("expected val<=k"));
                }
                self.eat('<')?;
                self.eat('=')?;
                let k = self.word()?;
                let k: u32 = k
                    .parse()
                    .map_err(|_| self.error("expected an integer bound"))?;
                self.eat(']')?;
                Ok(ChooseSpec::OrbitIndex(k))
            }
            _ => Err(self.error(&format!("unknown chooser '{name}'"))),
        }
    }

    fn statistic(&mut self) -> Result<Statistic> {
        let name = self.word()?;
        match name.as_str() {
            "HasRoot" => Ok(Statistic::HasRoot),
            "NumRoots" => Ok(Statistic::NumRoots),
            "Degree" => Ok(Statistic::Degree),
            "FactorDegrees" => Ok(Statistic::FactorDegrees),
            "NumAuts" => Ok(Statistic::NumAuts),
            "AutGroup" => Ok(Statistic::AutGroup),
            "Factors" => {
                self.eat('[')?;
                let inner = self.statistic()?;
                self.eat(']')?;
                Ok(Statistic::Factors(Box::new(inner)))
            }
            "Tup" => {
                let inner = self.bracket_list(|p| p.statistic())?;
                Ok(Statistic::Tup(inner))
            }
            _ => Err(self.error(&format!("unknown statistic '{name}'"))),
        }
    }
}

enum Kv {
    Model(ModelSpec),
    Deduce(DeduceSpec),
    Stat(Statistic),
    Choose(ChooseSpec),
}

fn shorthand(name: &str) -> Option<&'static str> {
    // The numbered families: A = Symmetric per segment, B = structured
    // (root-of-unity / root-of-uniformizer) segments; 0 = enumerate all
    // candidates with an index scan, 1 = the same restricted to small
    // remaining orbit index, 2 = descend via Maximal2.  00 approximates
    // the classic absolute-resolvent descent with HasRoot.
    match name {
        "A0" => Some("Seq[Tame,ARM[model=RamTower[Sym],deduce=All,stat=FactorDegrees,choose=Index]]"),
        "B0" => Some("Seq[Tame,ARM[model=Select[RootOfUnity,RootOfUniformizer,Sym],deduce=All,stat=FactorDegrees,choose=Index]]"),
        "A1" => Some("Seq[Tame,ARM[model=RamTower[Sym],deduce=All,stat=FactorDegrees,choose=OrbitIndex[val<=1]]]"),
        "B1" => Some("Seq[Tame,ARM[model=Select[RootOfUnity,RootOfUniformizer,Sym],deduce=All,stat=FactorDegrees,choose=OrbitIndex[val<=1]]]"),
        "A2" => Some("Seq[Tame,ARM[model=RamTower[Sym],deduce=Maximal2,stat=FactorDegrees,choose=OrbitIndex[val<=1]]]"),
        "B2" => Some("Seq[Tame,ARM[model=Select[RootOfUnity,RootOfUniformizer,Sym],deduce=Maximal2,stat=FactorDegrees,choose=OrbitIndex[val<=1]]]"),
        "00" => Some("Seq[Tame,ARM[model=Sym,deduce=Maximal,stat=HasRoot,choose=Index]]"),
        _ => None,
    }
}

/// Parses a parameterization string: a shorthand name, `Tame`, `ARM[…]`,
/// or `Seq[…]` of those.
pub fn parse_params(text: &str) -> Result<Parameterization> {
    let trimmed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(expansion) = shorthand(&trimmed) {
        let mut parsed = parse_params(expansion)?;
        parsed.name = Some(trimmed);
        return Ok(parsed);
    }
    let mut p = Parser::new(&trimmed);
    let algorithms = if trimmed.starts_with("Seq[") {
        p.pos = 3;
        p.bracket_list(|p| p.algorithm())?
    } else {
        vec![p.algorithm()?]
    };
    if p.pos != p.text.len() {
        return Err(p.error("trailing input"));
    }
    if algorithms.is_empty() {
        return Err(Error::invalid("empty parameterization sequence"));
    }
    Ok(Parameterization { name: None, algorithms })
}

/// Convenience: parse and run in one call.
pub fn galois_group_str(p: u64, f: &[BigInt], params: &str, seed: u64) -> Result<GaloisResult> {
    let parsed = parse_params(params)?;
    galois_group(p, f, &parsed, seed)
}

/// The direct product of one symmetric group per irreducible-factor degree
/// (the generic overgroup when nothing else is known); exposed for the
/// oracle harness.
pub fn symmetric_overgroup(degrees: &[usize]) -> PermGroup {
    direct_product(
        &degrees
            .iter()
            .map(|&d| PermGroup::symmetric(d))
            .collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::is_conjugate;

    fn coeffs(list: &[i64]) -> Vec<BigInt> {
        list.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn shorthands_expand() {
        let a0 = parse_params("A0").unwrap();
        assert_eq!(a0.name.as_deref(), Some("A0"));
        assert_eq!(a0.algorithms.len(), 2);
        assert_eq!(a0.algorithms[0], Algorithm::Tame);
        match &a0.algorithms[1] {
            Algorithm::Arm(arm) => {
                assert_eq!(arm.model, ModelSpec::RamTower(Box::new(ModelSpec::Sym)));
                assert_eq!(arm.deduce, DeduceSpec::All);
                assert_eq!(arm.stat, Statistic::FactorDegrees);
                assert_eq!(arm.choose, ChooseSpec::Index);
            }
            other => panic!("expected ARM, got {other:?}"),
        }
        let b2 = parse_params("B2").unwrap();
        match &b2.algorithms[1] {
            Algorithm::Arm(arm) => {
                assert_eq!(arm.model, ModelSpec::Select);
                assert_eq!(arm.deduce, DeduceSpec::Maximal2);
                assert_eq!(arm.choose, ChooseSpec::OrbitIndex(1));
            }
            other => panic!("expected ARM, got {other:?}"),
        }
        let zz = parse_params("00").unwrap();
        match &zz.algorithms[1] {
            Algorithm::Arm(arm) => {
                assert_eq!(arm.model, ModelSpec::Sym);
                assert_eq!(arm.deduce, DeduceSpec::Maximal);
                assert_eq!(arm.stat, Statistic::HasRoot);
            }
            other => panic!("expected ARM, got {other:?}"),
        }
    }

    #[test]
    fn grammar_round_trip_and_errors() {
        let text = "ARM[model=RamTower[Sym],deduce=Maximal2,stat=Tup[HasRoot,FactorDegrees],choose=OrbitIndex[val<=1]]";
        let parsed = parse_params(text).unwrap();
        match &parsed.algorithms[0] {
            Algorithm::Arm(arm) => {
                assert_eq!(
                    arm.stat,
                    Statistic::Tup(vec![Statistic::HasRoot, Statistic::FactorDegrees])
                );
            }
            other => panic!("expected ARM, got {other:?}"),
        }
        assert!(parse_params("bogus").is_err());
        assert!(parse_params("Seq[]").is_err());
        assert!(parse_params("ARM[model=Sym]").is_err());
    }

    #[test]
    fn tame_examples() {
        // x^3 - 2 over Q_2: totally tamely ramified, q = 2, full affine
        // group of order 6.
        let r = tame_galois(2, &coeffs(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(r.group.order(), 6);
        // x^3 - 2 over Q_7: 7 ≡ 1 mod 3, cyclic of order 3.
        let r = tame_galois(7, &coeffs(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(r.group.order(), 3);
        // x^4 + x + 1 over Q_2: unramified quartic, C_4.
        let r = tame_galois(2, &coeffs(&[1, 1, 0, 0, 1])).unwrap();
        assert_eq!(r.group.order(), 4);
        assert!(r.group.is_transitive());
        // (x^2+x+1)(x^3+x+1) over Q_2: product of unramified quadratic and
        // cubic, C_6 generated by (0 1)(2 3 4).
        let prod = coeffs(&[1, 2, 2, 2, 1, 1]);
        let r = tame_galois(2, &prod).unwrap();
        assert_eq!(r.group.order(), 6);
        // x^2 - 2 over Q_2 is wild: not applicable.
        assert!(matches!(
            tame_galois(2, &coeffs(&[-2, 0, 1])),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn quadratic_end_to_end() {
        let r = galois_group_str(2, &coeffs(&[-2, 0, 1]), "A0", 0).unwrap();
        assert_eq!(r.group.order(), 2);
        assert_eq!(r.algorithm, "ARM");
    }

    #[test]
    fn cubic_end_to_end_via_resolvents() {
        // Force past the Tame leg to exercise the resolvent method.
        let params = parse_params(
            "ARM[model=RamTower[Sym],deduce=All,stat=FactorDegrees,choose=Index]",
        )
        .unwrap();
        let r = galois_group(2, &coeffs(&[-2, 0, 0, 1]), &params, 0).unwrap();
        assert_eq!(r.group.order(), 6);
        let tame = tame_galois(2, &coeffs(&[-2, 0, 0, 1])).unwrap();
        let s3 = PermGroup::symmetric(3);
        assert!(is_conjugate(&s3, &r.group, &tame.group).unwrap().is_some());
    }

    #[test]
    fn simulated_oracle_sweep_s4() {
        let shape = GroupShape::Symmetric(4);
        let w = shape.group();
        let mode = TrancheMode::OrbitIndex { p: 2, max_val: Some(1) };
        for g in crate::perm::all_subgroup_classes(&w)
            .unwrap()
            .into_iter()
            .filter(PermGroup::is_transitive)
        {
            let (ans, queries) = simulated_run(
                &shape,
                &g,
                StrategyKind::Maximal2,
                &Statistic::FactorDegrees,
                &mode,
            )
            .unwrap();
            assert!(is_conjugate(&w, &ans, &g).unwrap().is_some());
            assert!(queries < 50);
        }
    }

    #[test]
    fn degree_statistic_cannot_separate() {
        let shape = GroupShape::Symmetric(4);
        let got = simulated_run(
            &shape,
            &PermGroup::alternating(4),
            StrategyKind::All,
            &Statistic::Degree,
            &TrancheMode::All,
        );
        assert!(matches!(got, Err(Error::Exhausted(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        // Not monic.
        assert!(galois_group_str(2, &coeffs(&[2, 0, 2]), "A0", 0).is_err());
        // Non-squarefree input.
        assert!(matches!(
            galois_group_str(2, &coeffs(&[1, 2, 1]), "A0", 0),
            Err(Error::Invalid(_))
        ));
    }
}
