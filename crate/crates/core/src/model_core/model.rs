use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{Budget, ModelError};
use crate::encodings::{Nat, Rational};
use crate::spec_lang::{eval_int, eval_pred, EvalError, Expr, ModelSpec, StatesSpec, DEFAULT_VAR};

type IntFnBox = dyn Fn(&Nat, u64) -> Result<Nat, EvalError> + Send + Sync;
type PredBox = dyn Fn(&Nat, u64) -> Result<bool, EvalError> + Send + Sync;

/// A total map on the nonnegative integers, evaluated under a step cap.
#[derive(Clone)]
pub struct NatFn {
    label: String,
    f: Arc<IntFnBox>,
}

impl NatFn {
    pub fn from_expr(var: &str, expr: Expr) -> Self {
        let label = format!("{var} -> {expr}");
        let var = var.to_string();
        NatFn {
            label,
            f: Arc::new(move |x, steps| eval_int(&expr, &var, x, steps)),
        }
    }

    /// Parse `expr` over the variable `var`.
    pub fn parse(var: &str, expr: &str) -> Result<Self, ModelError> {
        let e = crate::spec_lang::parse_expr(expr)?;
        Ok(NatFn::from_expr(var, e))
    }

    pub fn native(
        label: impl Into<String>,
        f: impl Fn(&Nat, u64) -> Result<Nat, EvalError> + Send + Sync + 'static,
    ) -> Self {
        NatFn {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        NatFn::native("n -> n", |x, _| Ok(x.clone()))
    }

    pub fn constant(c: Nat) -> Self {
        NatFn::native(format!("n -> {c}"), move |_, _| Ok(c.clone()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn call(&self, x: &Nat, max_steps: u64) -> Result<Nat, EvalError> {
        (self.f)(x, max_steps)
    }

    /// `x -> next(self(x))`; each stage gets the full step cap.
    pub fn then(&self, next: &NatFn) -> NatFn {
        let (a, b) = (self.f.clone(), next.f.clone());
        NatFn {
            label: format!("({}) then ({})", self.label, next.label),
            f: Arc::new(move |x, steps| b(&a(x, steps)?, steps)),
        }
    }
}

impl fmt::Debug for NatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NatFn({})", self.label)
    }
}

/// A total predicate on the nonnegative integers.
#[derive(Clone)]
pub struct NatPred {
    label: String,
    f: Arc<PredBox>,
}

impl NatPred {
    pub fn from_expr(var: &str, pred: Expr) -> Self {
        let label = format!("{pred}");
        let var = var.to_string();
        NatPred {
            label,
            f: Arc::new(move |x, steps| eval_pred(&pred, &var, x, steps)),
        }
    }

    pub fn parse(var: &str, pred: &str) -> Result<Self, ModelError> {
        let e = crate::spec_lang::parse_expr(pred)?;
        Ok(NatPred::from_expr(var, e))
    }

    pub fn native(
        label: impl Into<String>,
        f: impl Fn(&Nat, u64) -> Result<bool, EvalError> + Send + Sync + 'static,
    ) -> Self {
        NatPred {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn test(&self, x: &Nat, max_steps: u64) -> Result<bool, EvalError> {
        (self.f)(x, max_steps)
    }

    pub fn and(&self, other: &NatPred) -> NatPred {
        let (a, b) = (self.f.clone(), other.f.clone());
        NatPred {
            label: format!("({}) and ({})", self.label, other.label),
            f: Arc::new(move |x, steps| Ok(a(x, steps)? && b(x, steps)?)),
        }
    }
}

impl fmt::Debug for NatPred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NatPred({})", self.label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiAnswer {
    Accept,
    Reject,
    /// The procedure has not halted within the budget.
    Undecided,
}

/// A set given by a semidecision procedure.
#[derive(Clone, Debug)]
pub enum SemiDecidableSet {
    /// Membership decided by a total predicate.
    Decidable(NatPred),
    /// The set `{ list(0), list(1), ... }`; membership is only ever confirmed.
    Listed(NatFn),
}

impl SemiDecidableSet {
    pub fn label(&self) -> String {
        match self {
            SemiDecidableSet::Decidable(p) => format!("{{n : {}}}", p.label()),
            SemiDecidableSet::Listed(f) => format!("ran({})", f.label()),
        }
    }

    /// Run the procedure for at most `budget.max_states` rounds.
    pub fn semidecide(&self, n: &Nat, budget: &Budget) -> SemiAnswer {
        match self {
            SemiDecidableSet::Decidable(p) => match p.test(n, budget.max_steps) {
                Ok(true) => SemiAnswer::Accept,
                Ok(false) => SemiAnswer::Reject,
                Err(_) => SemiAnswer::Undecided,
            },
            SemiDecidableSet::Listed(f) => {
                for i in 0..budget.max_states {
                    if let Ok(x) = f.call(&Nat::from(i), budget.max_steps) {
                        if &x == n {
                            return SemiAnswer::Accept;
                        }
                    }
                }
                SemiAnswer::Undecided
            }
        }
    }

    pub fn decider(&self) -> Option<&NatPred> {
        match self {
            SemiDecidableSet::Decidable(p) => Some(p),
            SemiDecidableSet::Listed(_) => None,
        }
    }
}

/// What one enumerator index yields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Visit {
    State(Nat),
    Skip,
    /// A candidate whose membership was not settled within the budget.
    Deferred(Nat),
}

type VisitFn = dyn Fn(u64, &Budget) -> Result<Visit, EvalError> + Send + Sync;

#[derive(Clone)]
enum SpaceKind {
    Enumerate(NatFn),
    Where(NatPred),
    Filter {
        base: StateSpace,
        map: NatFn,
        set: SemiDecidableSet,
    },
    Native {
        visit: Arc<VisitFn>,
        decider: Option<NatPred>,
    },
}

/// A recursively enumerable set of states, presented by index.
#[derive(Clone)]
pub struct StateSpace {
    key: String,
    kind: Arc<SpaceKind>,
}

/// The first `max_states` indices of a state space.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateScan {
    pub states: Vec<Nat>,
    pub deferred: Vec<Nat>,
    pub skipped: u64,
}

impl StateSpace {
    /// States `expr(0), expr(1), ...`.
    pub fn enumerate(var: &str, expr: Expr) -> Self {
        let key = format!("enumerate {}", expr.rename_var(var, DEFAULT_VAR));
        StateSpace {
            key,
            kind: Arc::new(SpaceKind::Enumerate(NatFn::from_expr(var, expr))),
        }
    }

    /// The numbers accepted by `pred`, in increasing order.
    pub fn where_pred(var: &str, pred: Expr) -> Self {
        let key = format!("where {}", pred.rename_var(var, DEFAULT_VAR));
        StateSpace {
            key,
            kind: Arc::new(SpaceKind::Where(NatPred::from_expr(var, pred))),
        }
    }

    pub fn parse_where(pred: &str) -> Result<Self, ModelError> {
        let e = crate::spec_lang::parse_expr(pred)?;
        let vars = e.free_vars();
        let var = vars
            .iter()
            .next()
            .cloned()
            .unwrap_or_else(|| DEFAULT_VAR.to_string());
        Ok(StateSpace::where_pred(&var, e))
    }

    pub fn all() -> Self {
        StateSpace::where_pred(DEFAULT_VAR, Expr::Bool(true))
    }

    /// States of `base` whose `map` value lies in `set`.
    pub fn filter(base: &StateSpace, map: &NatFn, set: &SemiDecidableSet) -> Self {
        StateSpace {
            key: format!("{} | {} in {}", base.key, map.label(), set.label()),
            kind: Arc::new(SpaceKind::Filter {
                base: base.clone(),
                map: map.clone(),
                set: set.clone(),
            }),
        }
    }

    pub fn native(
        key: impl Into<String>,
        visit: impl Fn(u64, &Budget) -> Result<Visit, EvalError> + Send + Sync + 'static,
        decider: Option<NatPred>,
    ) -> Self {
        StateSpace {
            key: key.into(),
            kind: Arc::new(SpaceKind::Native {
                visit: Arc::new(visit),
                decider,
            }),
        }
    }

    /// Identity of the presentation; equal keys mean the same state set.
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn visit(&self, index: u64, budget: &Budget) -> Result<Visit, EvalError> {
        match &*self.kind {
            SpaceKind::Enumerate(f) => f
                .call(&Nat::from(index), budget.max_steps)
                .map(Visit::State),
            SpaceKind::Where(p) => {
                let n = Nat::from(index);
                Ok(if p.test(&n, budget.max_steps)? {
                    Visit::State(n)
                } else {
                    Visit::Skip
                })
            }
            SpaceKind::Filter { base, map, set } => match base.visit(index, budget)? {
                Visit::State(s) => {
                    let v = map.call(&s, budget.max_steps)?;
                    Ok(match set.semidecide(&v, budget) {
                        SemiAnswer::Accept => Visit::State(s),
                        SemiAnswer::Reject => Visit::Skip,
                        SemiAnswer::Undecided => Visit::Deferred(s),
                    })
                }
                other => Ok(other),
            },
            SpaceKind::Native { visit, .. } => visit(index, budget),
        }
    }

    /// Visit indices `0..budget.max_states`.
    pub fn scan(&self, budget: &Budget) -> Result<StateScan, ModelError> {
        let mut out = StateScan::default();
        for i in 0..budget.max_states {
            match self
                .visit(i, budget)
                .map_err(|source| ModelError::Enumerate { index: i, source })?
            {
                Visit::State(s) => out.states.push(s),
                Visit::Skip => out.skipped += 1,
                Visit::Deferred(s) => out.deferred.push(s),
            }
        }
        Ok(out)
    }

    /// Decide membership when the presentation allows it.
    pub fn decides(&self, s: &Nat, max_steps: u64) -> Option<bool> {
        match &*self.kind {
            SpaceKind::Enumerate(_) => None,
            SpaceKind::Where(p) => p.test(s, max_steps).ok(),
            SpaceKind::Filter { base, map, set } => {
                if !base.decides(s, max_steps)? {
                    return Some(false);
                }
                let v = map.call(s, max_steps).ok()?;
                set.decider()?.test(&v, max_steps).ok()
            }
            SpaceKind::Native { decider, .. } => decider.as_ref()?.test(s, max_steps).ok(),
        }
    }
}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSpace({})", self.key)
    }
}

#[derive(Clone, Debug)]
pub struct Observable {
    pub symbol: String,
    pub map: NatFn,
    /// Exact characterization of the range, when one is known.
    pub range_decider: Option<NatPred>,
}

impl Observable {
    pub fn new(symbol: impl Into<String>, map: NatFn) -> Self {
        Observable {
            symbol: symbol.into(),
            map,
            range_decider: None,
        }
    }

    pub fn with_range(mut self, decider: NatPred) -> Self {
        self.range_decider = Some(decider);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Result(Nat),
    Failure,
}

impl Outcome {
    pub fn result(&self) -> Option<&Nat> {
        match self {
            Outcome::Result(n) => Some(n),
            Outcome::Failure => None,
        }
    }
}

/// A seeded stand-in for a physical measuring operation.
#[derive(Clone)]
pub struct MeasuringOperation {
    pub description: String,
    run: Arc<dyn Fn(u64) -> Outcome + Send + Sync>,
}

impl MeasuringOperation {
    pub fn new(
        description: impl Into<String>,
        run: impl Fn(u64) -> Outcome + Send + Sync + 'static,
    ) -> Self {
        MeasuringOperation {
            description: description.into(),
            run: Arc::new(run),
        }
    }

    pub fn run(&self, seed: u64) -> Outcome {
        (self.run)(seed)
    }
}

impl fmt::Debug for MeasuringOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MeasuringOperation({})", self.description)
    }
}

pub fn simulate_measurement(op: &MeasuringOperation, seed: u64) -> Outcome {
    op.run(seed)
}

/// Exact per-state metadata that is not an observable.
#[derive(Clone)]
pub struct Annotation {
    pub name: String,
    f: Arc<dyn Fn(&Nat) -> Option<Rational> + Send + Sync>,
}

impl Annotation {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&Nat) -> Option<Rational> + Send + Sync + 'static,
    ) -> Self {
        Annotation {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn get(&self, state: &Nat) -> Option<Rational> {
        (self.f)(state)
    }
}

impl fmt::Debug for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Annotation({})", self.name)
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub states: StateSpace,
    observables: Vec<Observable>,
    pub ops: BTreeMap<String, MeasuringOperation>,
    pub annotation: Option<Annotation>,
}

impl Model {
    pub fn new(
        name: impl Into<String>,
        states: StateSpace,
        observables: Vec<Observable>,
    ) -> Result<Self, ModelError> {
        if observables.is_empty() {
            return Err(ModelError::NoObservables);
        }
        for (i, o) in observables.iter().enumerate() {
            if observables[..i].iter().any(|p| p.symbol == o.symbol) {
                return Err(ModelError::SymbolCollision(o.symbol.clone()));
            }
        }
        Ok(Model {
            name: name.into(),
            states,
            observables,
            ops: BTreeMap::new(),
            annotation: None,
        })
    }

    pub fn with_op(mut self, symbol: &str, op: MeasuringOperation) -> Self {
        self.ops.insert(symbol.to_string(), op);
        self
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn symbols(&self) -> Vec<&str> {
        self.observables.iter().map(|o| o.symbol.as_str()).collect()
    }

    pub fn observable(&self, symbol: &str) -> Result<&Observable, ModelError> {
        self.observables
            .iter()
            .find(|o| o.symbol == symbol)
            .ok_or_else(|| ModelError::UnknownSymbol(symbol.to_string()))
    }

    pub fn op(&self, symbol: &str) -> Option<&MeasuringOperation> {
        self.ops.get(symbol)
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Model, ModelError> {
        let states = match &spec.states {
            StatesSpec::Enumerate { var, expr } => StateSpace::enumerate(var, expr.clone()),
            StatesSpec::Where { var, pred } => StateSpace::where_pred(var, pred.clone()),
        };
        let observables = spec
            .observables
            .iter()
            .map(|o| {
                let mut obs = Observable::new(&o.symbol, NatFn::from_expr(&o.var, o.expr.clone()));
                if let Some(r) = spec.range(&o.symbol) {
                    obs.range_decider = Some(NatPred::from_expr(&r.var, r.pred.clone()));
                }
                obs
            })
            .collect();
        let mut model = Model::new(&spec.name, states, observables)?;
        for s in &spec.simops {
            model
                .ops
                .insert(s.symbol.clone(), super::simulate::from_spec(s)?);
        }
        Ok(model)
    }

    pub fn parse(text: &str) -> Result<Model, ModelError> {
        Model::from_spec(&crate::spec_lang::parse_model(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: u64) -> Nat {
        Nat::from(x)
    }

    #[test]
    fn scans() {
        let b = Budget::new(5, 100);
        let evens = StateSpace::parse_where("s % 2 = 0").unwrap();
        assert_eq!(evens.key(), "where s % 2 = 0");
        let scan = evens.scan(&b).unwrap();
        assert_eq!(scan.states, vec![n(0), n(2), n(4)]);
        assert_eq!(scan.skipped, 2);
        let sq = StateSpace::enumerate("i", crate::spec_lang::parse_expr("i*i").unwrap());
        assert_eq!(sq.key(), "enumerate s * s");
        assert_eq!(
            sq.scan(&b).unwrap().states,
            vec![n(0), n(1), n(4), n(9), n(16)]
        );
        assert_eq!(sq.decides(&n(4), 10), None);
        assert_eq!(evens.decides(&n(4), 10), Some(true));
        assert!(StateSpace::all()
            .scan(&Budget::new(0, 10))
            .unwrap()
            .states
            .is_empty());
    }

    #[test]
    fn filter_defers_unsettled_states() {
        let listed = SemiDecidableSet::Listed(NatFn::parse("i", "3*i").unwrap());
        let f = StateSpace::filter(&StateSpace::all(), &NatFn::identity(), &listed);
        let scan = f.scan(&Budget::new(4, 100)).unwrap();
        assert_eq!(scan.states, vec![n(0), n(3)]);
        assert_eq!(scan.deferred, vec![n(1), n(2)]);
        // with more budget the listing reaches further
        let scan = f.scan(&Budget::new(7, 100)).unwrap();
        assert_eq!(scan.states, vec![n(0), n(3), n(6)]);
    }

    #[test]
    fn step_exhaustion_names_the_index() {
        let s = StateSpace::enumerate("i", crate::spec_lang::parse_expr("i+i+i+i").unwrap());
        let err = s.scan(&Budget::new(3, 2)).unwrap_err();
        assert!(matches!(err, ModelError::Enumerate { index: 0, .. }));
    }

    #[test]
    fn model_invariants() {
        let f = Observable::new("f", NatFn::identity());
        assert!(matches!(
            Model::new("m", StateSpace::all(), vec![f.clone(), f]),
            Err(ModelError::SymbolCollision(_))
        ));
        assert!(matches!(
            Model::new("m", StateSpace::all(), vec![]),
            Err(ModelError::NoObservables)
        ));
    }
}
