//! Finite state spaces, local maps, rate-weighted map families and the
//! preset cooperative-branching / Moran families.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A state is an index `0..n_S`.
pub type State = u32;

/// Default cap on `n_S^k` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Number of inputs of a map of arity `k` over `n` states, or `ArityOverflow`.
pub fn table_size(n: usize, k: usize, cap: u128) -> Result<usize> {
    let mut size: u128 = 1;
    for _ in 0..k {
        size = size.saturating_mul(n as u128);
        if size > cap {
            return Err(Error::ArityOverflow { size, cap });
        }
    }
    Ok(size as usize)
}

/// Finite state space `{0, …, size-1}` with an optional partial order.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace {
    size: usize,
    // leq[a * size + b] == (a <= b)
    order: Option<Vec<bool>>,
}

impl StateSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("state space must have at least one state".into()));
        }
        Ok(Self { size, order: None })
    }

    /// `{0, …, size-1}` with the total order `0 < 1 < … < size-1`.
    pub fn chain(size: usize) -> Result<Self> {
        let mut s = Self::new(size)?;
        s.order = Some((0..size * size).map(|i| i / size <= i % size).collect());
        Ok(s)
    }

    /// `{0, 1}` ordered by `0 <= 1`.
    pub fn binary() -> Self {
        Self::chain(2).expect("two states")
    }

    /// Attaches a partial order given as a relation matrix `leq(a, b)`.
    pub fn with_order(size: usize, leq: impl Fn(State, State) -> bool) -> Result<Self> {
        let mut s = Self::new(size)?;
        let rel: Vec<bool> = (0..size * size)
            .map(|i| leq((i / size) as State, (i % size) as State))
            .collect();
        let at = |a: usize, b: usize| rel[a * size + b];
        for a in 0..size {
            if !at(a, a) {
                return Err(Error::InvalidParameter(format!("order is not reflexive at {a}")));
            }
            for b in 0..size {
                if a != b && at(a, b) && at(b, a) {
                    return Err(Error::InvalidParameter(format!(
                        "order is not antisymmetric at ({a}, {b})"
                    )));
                }
                for c in 0..size {
                    if at(a, b) && at(b, c) && !at(a, c) {
                        return Err(Error::InvalidParameter(format!(
                            "order is not transitive at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        s.order = Some(rel);
        Ok(s)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn has_order(&self) -> bool {
        self.order.is_some()
    }

    /// `Some(a <= b)` when an order is declared.
    pub fn leq(&self, a: State, b: State) -> Option<bool> {
        self.order
            .as_ref()
            .map(|o| o[a as usize * self.size + b as usize])
    }

    /// True when an order is declared with minimum `0` and maximum `size-1`.
    pub fn is_bounded(&self) -> bool {
        let top = (self.size - 1) as State;
        self.has_order()
            && (0..self.size as State)
                .all(|s| self.leq(0, s) == Some(true) && self.leq(s, top) == Some(true))
    }
}

/// A map `g: S^k -> S` stored as a dense lookup table.
///
/// Inputs are encoded in mixed radix with the first coordinate most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMap {
    name: String,
    n_states: usize,
    arity: usize,
    table: Vec<State>,
}

impl LocalMap {
    pub fn new(name: impl Into<String>, n_states: usize, arity: usize, table: Vec<State>) -> Result<Self> {
        let name = name.into();
        let size = table_size(n_states, arity, DEFAULT_ENUMERATION_CAP)?;
        if table.len() != size {
            return Err(Error::InvalidMap(format!(
                "map `{name}` needs {size} table entries, got {}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&v| v as usize >= n_states) {
            return Err(Error::InvalidMap(format!("map `{name}` outputs state {bad} outside the space")));
        }
        Ok(Self { name, n_states, arity, table })
    }

    /// Builds the table by evaluating `f` on every input.
    pub fn from_fn(
        name: impl Into<String>,
        n_states: usize,
        arity: usize,
        mut f: impl FnMut(&[State]) -> State,
    ) -> Result<Self> {
        let size = table_size(n_states, arity, DEFAULT_ENUMERATION_CAP)?;
        let mut x = vec![0; arity];
        let table = (0..size)
            .map(|i| {
                decode_into(i, n_states, &mut x);
                f(&x)
            })
            .collect();
        Self::new(name, n_states, arity, table)
    }

    /// `cob(x1, x2, x3) = x1 ∨ (x2 ∧ x3)` on `{0,1}`.
    pub fn cob() -> Self {
        Self::from_fn("cob", 2, 3, |x| x[0] | (x[1] & x[2])).expect("cob")
    }

    /// `dth(∅) = 0`.
    pub fn dth() -> Self {
        Self::constant("dth", 2, 0)
    }

    /// `bth(∅) = 1`.
    pub fn bth() -> Self {
        Self::constant("bth", 2, 1)
    }

    /// `bra(x1, x2) = x1 ∨ x2` on `{0,1}`.
    pub fn bra() -> Self {
        Self::from_fn("bra", 2, 2, |x| x[0] | x[1]).expect("bra")
    }

    pub fn identity(n_states: usize) -> Self {
        Self::from_fn("identity", n_states, 1, |x| x[0]).expect("identity")
    }

    /// Arity-zero map with a single output.
    pub fn constant(name: impl Into<String>, n_states: usize, value: State) -> Self {
        Self::new(name, n_states, 0, vec![value]).expect("constant map")
    }

    /// Looks up one of the built-in maps `cob`, `dth`, `bth`, `bra`, `identity`.
    pub fn builtin(name: &str, n_states: usize) -> Option<Self> {
        match (name, n_states) {
            ("cob", 2) => Some(Self::cob()),
            ("dth", 2) => Some(Self::dth()),
            ("bth", 2) => Some(Self::bth()),
            ("bra", 2) => Some(Self::bra()),
            ("identity", n) => Some(Self::identity(n)),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[State] {
        &self.table
    }

    pub fn index_of(&self, x: &[State]) -> usize {
        debug_assert_eq!(x.len(), self.arity);
        x.iter().fold(0usize, |acc, &s| acc * self.n_states + s as usize)
    }

    #[inline]
    pub fn apply(&self, x: &[State]) -> State {
        self.table[self.index_of(x)]
    }

    pub fn is_identity(&self) -> bool {
        self.arity == 1 && self.table.iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    /// True when `g(v, …, v) = v`.
    pub fn preserves(&self, v: State) -> bool {
        let idx = (0..self.arity).fold(0usize, |acc, _| acc * self.n_states + v as usize);
        self.table[idx] == v
    }

    /// Monotonicity under the coordinatewise order induced by `space`.
    /// `None` when the space carries no order.
    pub fn is_monotone(&self, space: &StateSpace) -> Option<bool> {
        space.leq(0, 0)?;
        let n = self.n_states;
        let mut x = vec![0; self.arity];
        let mut y = vec![0; self.arity];
        for i in 0..self.table.len() {
            decode_into(i, n, &mut x);
            for j in 0..self.table.len() {
                decode_into(j, n, &mut y);
                let below = x.iter().zip(&y).all(|(&a, &b)| space.leq(a, b) == Some(true));
                if below && space.leq(self.table[i], self.table[j]) != Some(true) {
                    return Some(false);
                }
            }
        }
        Some(true)
    }

    /// True when the output only depends on the coordinates in `coords`.
    pub fn depends_only_on(&self, coords: &[usize]) -> bool {
        let n = self.n_states;
        let mut x = vec![0; self.arity];
        let mut y = vec![0; self.arity];
        for i in 0..self.table.len() {
            decode_into(i, n, &mut x);
            for (c, slot) in y.iter_mut().enumerate() {
                *slot = if coords.contains(&c) { x[c] } else { 0 };
            }
            if self.table[i] != self.apply(&y) {
                return false;
            }
        }
        true
    }

    /// Restriction to the (increasing) coordinates `coords`: the returned map
    /// reads its inputs into those positions and zero elsewhere.
    pub fn restrict(&self, coords: &[usize]) -> Result<Self> {
        let mut full = vec![0; self.arity];
        Self::from_fn(self.name.clone(), self.n_states, coords.len(), |x| {
            full.iter_mut().for_each(|v| *v = 0);
            for (&c, &v) in coords.iter().zip(x) {
                full[c] = v;
            }
            self.apply(&full)
        })
    }
}

/// Writes the mixed-radix digits of `index` into `out` (first digit most significant).
#[inline]
pub fn decode_into(mut index: usize, n: usize, out: &mut [State]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % n) as State;
        index /= n;
    }
}

/// Probability vector on a finite state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist {
    weights: Vec<f64>,
}

impl Dist {
    /// Validates and renormalizes. Entries in `[-1e-12, 0)` are clipped to zero.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDist("empty weight vector".into()));
        }
        let mut weights = weights;
        for w in weights.iter_mut() {
            if !w.is_finite() || *w < -1e-12 {
                return Err(Error::InvalidDist(format!("weight {w} is negative or not finite")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDist("weights sum to zero".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { weights })
    }

    pub fn delta(n: usize, s: State) -> Self {
        let mut weights = vec![0.0; n];
        weights[s as usize] = 1.0;
        Self { weights }
    }

    /// Law on `{0,1}` with `P[1] = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDist(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Ok(Self { weights: vec![1.0 - p, p] })
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Self { weights }
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

    pub fn prob(&self, s: State) -> f64 {
        self.weights[s as usize]
    }

    /// Inverse-CDF draw from a uniform `u` in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> State {
        let mut acc = 0.0;
        for (s, &w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return s as State;
            }
        }
        // round-off: fall back to the last state with positive mass
        self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0) as State
    }
}

/// One `(map, rate)` atom of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub map: LocalMap,
    pub rate: f64,
}

/// Branching constants of a family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    /// `Σ rate·(κ - 1)`, the Malthusian growth rate of the branching tree.
    pub k: f64,
    /// `Σ rate·(κ + 1)`.
    pub l: f64,
    pub subcritical: bool,
}

/// Finite list of rate-weighted local maps over one state space.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFamily {
    space: StateSpace,
    entries: Vec<Entry>,
    cumulative: Vec<f64>,
    total_rate: f64,
}

impl MapFamily {
    /// Zero-rate entries are pruned; an empty result is `EmptyFamily`.
    pub fn new(space: StateSpace, entries: Vec<(LocalMap, f64)>) -> Result<Self> {
        let mut kept = Vec::with_capacity(entries.len());
        for (map, rate) in entries {
            if !rate.is_finite() || rate < 0.0 {
                return Err(Error::NegativeRate(rate));
            }
            if map.n_states() != space.size() {
                return Err(Error::InvalidMap(format!(
                    "map `{}` is over {} states, family space has {}",
                    map.name(),
                    map.n_states(),
                    space.size()
                )));
            }
            if rate > 0.0 {
                kept.push(Entry { map, rate });
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut acc = 0.0;
        let cumulative = kept
            .iter()
            .map(|e| {
                acc += e.rate;
                acc
            })
            .collect();
        Ok(Self { space, entries: kept, cumulative, total_rate: acc })
    }

    pub fn preset(preset: Preset) -> Result<Self> {
        let entries = preset.flat_entries()?;
        Self::new(StateSpace::binary(), entries)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    pub fn mean_arity(&self) -> f64 {
        self.entries.iter().map(|e| e.rate * e.map.arity() as f64).sum::<f64>() / self.total_rate
    }

    pub fn max_arity(&self) -> usize {
        self.entries.iter().map(|e| e.map.arity()).max().unwrap_or(0)
    }

    /// Entry index for a uniform draw `u` in `[0, 1)`, chosen with probability rate/|r|.
    #[inline]
    pub fn choose(&self, u: f64) -> usize {
        let x = u * self.total_rate;
        self.cumulative
            .iter()
            .position(|&c| x < c)
            .unwrap_or(self.entries.len() - 1)
    }

    pub fn constants(&self) -> Constants {
        let k = self.entries.iter().map(|e| e.rate * (e.map.arity() as f64 - 1.0)).sum();
        let l = self.entries.iter().map(|e| e.rate * (e.map.arity() as f64 + 1.0)).sum();
        let branching = self.entries.iter().any(|e| e.map.arity() != 1);
        let subcritical = k < 0.0 || (k == 0.0 && branching);
        Constants { k, l, subcritical }
    }

    /// True when the space is ordered and every map is monotone.
    pub fn is_monotone(&self) -> bool {
        self.entries.iter().all(|e| e.map.is_monotone(&self.space) == Some(true))
    }

    /// True when every map satisfies `g(v, …, v) = v`.
    pub fn preserves(&self, v: State) -> bool {
        self.entries.iter().all(|e| e.map.preserves(v))
    }

    /// Serializes to the line-based `key = value` format read by [`MapFamily::from_config`].
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        writeln!(out, "states = {}", self.space.size()).unwrap();
        if let Some(order) = self.order_spec() {
            writeln!(out, "order = {order}").unwrap();
        }
        let mut defined: Vec<&str> = Vec::new();
        for e in &self.entries {
            let name = e.map.name();
            let is_builtin = LocalMap::builtin(name, self.space.size()).as_ref() == Some(&e.map);
            if !is_builtin && !defined.contains(&name) {
                let values: Vec<String> = e.map.table().iter().map(|v| v.to_string()).collect();
                writeln!(out, "map {name} = {} : {}", e.map.arity(), values.join(" ")).unwrap();
                defined.push(name);
            }
        }
        for e in &self.entries {
            writeln!(out, "entry = {} {}", e.map.name(), e.rate).unwrap();
        }
        out
    }

    fn order_spec(&self) -> Option<String> {
        let n = self.space.size();
        if !self.space.has_order() {
            return None;
        }
        if self.space == StateSpace::chain(n).ok()? {
            return Some("chain".into());
        }
        let pairs: Vec<String> = (0..n as State)
            .flat_map(|a| (0..n as State).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && self.space.leq(a, b) == Some(true))
            .map(|(a, b)| format!("{a}<{b}"))
            .collect();
        Some(pairs.join(" "))
    }

    /// Parses a family description.
    ///
    /// ```text
    /// states = 2
    /// order = chain            # optional; or explicit pairs like `0<1 0<2`
    /// map maj = 3 : 0 0 0 1 0 1 1 1
    /// entry = cob 4.5
    /// entry = maj 0.25
    /// ```
    pub fn from_config(text: &str) -> Result<Self> {
        let mut states: Option<usize> = None;
        let mut order: Option<String> = None;
        let mut maps: Vec<(String, usize, Vec<State>)> = Vec::new();
        let mut entries: Vec<(String, f64)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Config(format!("line {}: {msg}: `{raw}`", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "states" {
                states = Some(value.parse().map_err(|_| err("bad state count"))?);
            } else if key == "order" {
                order = Some(value.to_string());
            } else if let Some(name) = key.strip_prefix("map ") {
                let (arity, table) = value.split_once(':').ok_or_else(|| err("expected `arity : table`"))?;
                let arity = arity.trim().parse().map_err(|_| err("bad arity"))?;
                let table = table
                    .split_whitespace()
                    .map(|v| v.parse::<State>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| err("bad table value"))?;
                maps.push((name.trim().to_string(), arity, table));
            } else if key == "entry" {
                let mut parts = value.split_whitespace();
                let name = parts.next().ok_or_else(|| err("missing map name"))?;
                let rate = parts
                    .next()
                    .ok_or_else(|| err("missing rate"))?
                    .parse::<f64>()
                    .map_err(|_| err("bad rate"))?;
                entries.push((name.to_string(), rate));
            } else {
                return Err(err("unknown key"));
            }
        }
        let n = states.ok_or_else(|| Error::Config("missing `states`".into()))?;
        let space = match order.as_deref() {
            None | Some("none") => StateSpace::new(n)?,
            Some("chain") => StateSpace::chain(n)?,
            Some(pairs) => {
                let mut rel = Vec::new();
                for p in pairs.split_whitespace() {
                    let (a, b) = p
                        .split_once('<')
                        .ok_or_else(|| Error::Config(format!("bad order pair `{p}`")))?;
                    let a: State = a.parse().map_err(|_| Error::Config(format!("bad order pair `{p}`")))?;
                    let b: State = b.parse().map_err(|_| Error::Config(format!("bad order pair `{p}`")))?;
                    rel.push((a, b));
                }
                StateSpace::with_order(n, |a, b| a == b || rel.contains(&(a, b)))?
            }
        };
        let mut list = Vec::new();
        for (name, rate) in entries {
            let map = match maps.iter().find(|(m, _, _)| *m == name) {
                Some((m, arity, table)) => LocalMap::new(m.clone(), n, *arity, table.clone())?,
                None => LocalMap::builtin(&name, n)
                    .ok_or_else(|| Error::Config(format!("unknown map `{name}`")))?,
            };
            list.push((map, rate));
        }
        Self::new(space, list)
    }
}

/// Named model families over `{0,1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    /// `cob` at rate `alpha`, `dth` at rate 1.
    Coop { alpha: f64 },
    /// `cob` at `alpha`, `dth` at 1, `bth` at `beta`.
    CoopBirth { alpha: f64, beta: f64 },
    /// `cob` at `gamma`, `bra` at `s`, `dth` at `u·nu0`, `bth` at `u·nu1`.
    Moran { gamma: f64, s: f64, u: f64, nu0: f64, nu1: f64 },
}

impl Preset {
    fn flat_entries(&self) -> Result<Vec<(LocalMap, f64)>> {
        let check = |x: f64| if x.is_finite() && x >= 0.0 { Ok(x) } else { Err(Error::NegativeRate(x)) };
        Ok(match *self {
            Preset::Coop { alpha } => vec![(LocalMap::cob(), check(alpha)?), (LocalMap::dth(), 1.0)],
            Preset::CoopBirth { alpha, beta } => vec![
                (LocalMap::cob(), check(alpha)?),
                (LocalMap::dth(), 1.0),
                (LocalMap::bth(), check(beta)?),
            ],
            Preset::Moran { gamma, s, u, nu0, nu1 } => {
                let (nu0, nu1) = (check(nu0)?, check(nu1)?);
                if ((nu0 + nu1) - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!("nu0 + nu1 = {} must equal 1", nu0 + nu1)));
                }
                vec![
                    (LocalMap::cob(), check(gamma)?),
                    (LocalMap::bra(), check(s)?),
                    (LocalMap::dth(), check(u)? * nu0),
                    (LocalMap::bth(), u * nu1),
                ]
            }
        })
    }
}

/// One coordinate map `γ_i: S^λ -> S` of a structured entry, with its dependency set.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    map: LocalMap,
    deps: Vec<usize>,
}

impl Component {
    /// `map` is a full map on `S^λ`; it is verified to depend only on `deps`.
    pub fn new(map: LocalMap, mut deps: Vec<usize>) -> Result<Self> {
        deps.sort_unstable();
        deps.dedup();
        if deps.iter().any(|&d| d >= map.arity()) {
            return Err(Error::InvalidMap(format!("dependency index out of range for `{}`", map.name())));
        }
        if !map.depends_only_on(&deps) {
            return Err(Error::InvalidMap(format!(
                "map `{}` depends on coordinates outside {:?}",
                map.name(),
                deps
            )));
        }
        Ok(Self { map, deps })
    }

    /// Embeds a map of arity `|deps|` as a component reading coordinates `deps` of `S^λ`.
    pub fn from_reduced(reduced: &LocalMap, deps: Vec<usize>, lambda: usize) -> Result<Self> {
        if deps.len() != reduced.arity() {
            return Err(Error::InvalidMap(format!(
                "map `{}` has arity {}, but {} dependencies were given",
                reduced.name(),
                reduced.arity(),
                deps.len()
            )));
        }
        if deps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("dependencies must be strictly increasing".into()));
        }
        let mut sub = vec![0; deps.len()];
        let full = LocalMap::from_fn(reduced.name(), reduced.n_states(), lambda, |x| {
            for (slot, &d) in sub.iter_mut().zip(&deps) {
                *slot = x[d];
            }
            reduced.apply(&sub)
        })?;
        Self::new(full, deps)
    }

    /// Projection onto coordinate `i`.
    pub fn identity(i: usize, lambda: usize, n_states: usize) -> Result<Self> {
        Self::from_reduced(&LocalMap::identity(n_states), vec![i], lambda)
    }

    pub fn map(&self) -> &LocalMap {
        &self.map
    }

    pub fn deps(&self) -> &[usize] {
        &self.deps
    }

    /// Map of arity `|K_i|` reading the dependency coordinates in increasing order.
    pub fn reduced(&self) -> LocalMap {
        let mut full = vec![0; self.map.arity()];
        LocalMap::from_fn(self.map.name(), self.map.n_states(), self.deps.len(), |x| {
            for (&d, &v) in self.deps.iter().zip(x) {
                full[d] = v;
            }
            self.map.apply(&full)
        })
        .expect("reduced table is no larger than the full one")
    }

    /// True for the projection onto its own coordinate `i`.
    pub fn is_identity_at(&self, i: usize) -> bool {
        self.deps == [i] && self.reduced().is_identity()
    }
}

/// A rate and `λ` component maps acting jointly on a `λ`-tuple of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredEntry {
    pub rate: f64,
    pub components: Vec<Component>,
}

impl StructuredEntry {
    pub fn new(rate: f64, components: Vec<Component>) -> Result<Self> {
        let lambda = components.len();
        if lambda == 0 {
            return Err(Error::InvalidParameter("structured entry needs λ >= 1".into()));
        }
        if components.iter().any(|c| c.map.arity() != lambda) {
            return Err(Error::InvalidMap("every component must be a map on S^λ".into()));
        }
        Ok(Self { rate, components })
    }

    pub fn lambda(&self) -> usize {
        self.components.len()
    }
}

/// Vector-valued family driving the particle system.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredFamily {
    space: StateSpace,
    entries: Vec<StructuredEntry>,
    cumulative: Vec<f64>,
    total_rate: f64,
}

impl StructuredFamily {
    pub fn new(space: StateSpace, entries: Vec<StructuredEntry>) -> Result<Self> {
        let mut kept = Vec::new();
        for e in entries {
            if !e.rate.is_finite() || e.rate < 0.0 {
                return Err(Error::NegativeRate(e.rate));
            }
            if e.components.iter().any(|c| c.map.n_states() != space.size()) {
                return Err(Error::InvalidMap("component over the wrong state space".into()));
            }
            if e.rate > 0.0 {
                kept.push(e);
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut acc = 0.0;
        let cumulative = kept
            .iter()
            .map(|e| {
                acc += e.rate;
                acc
            })
            .collect();
        Ok(Self { space, entries: kept, cumulative, total_rate: acc })
    }

    /// Wraps a flat family: a map of arity `k` becomes an entry with
    /// `λ = max(k, 1)`, `γ_1 = g` on all `k` coordinates and identities elsewhere.
    pub fn from_flat(family: &MapFamily) -> Result<Self> {
        let n = family.space().size();
        let entries = family
            .entries()
            .iter()
            .map(|e| {
                let k = e.map.arity();
                let lambda = k.max(1);
                let mut comps = vec![Component::from_reduced(&e.map, (0..k).collect(), lambda)?];
                for i in 1..lambda {
                    comps.push(Component::identity(i, lambda, n)?);
                }
                StructuredEntry::new(e.rate, comps)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(family.space().clone(), entries)
    }

    pub fn preset(preset: Preset) -> Result<Self> {
        Self::from_flat(&MapFamily::preset(preset)?)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn entries(&self) -> &[StructuredEntry] {
        &self.entries
    }

    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    pub fn max_lambda(&self) -> usize {
        self.entries.iter().map(|e| e.lambda()).max().unwrap_or(1)
    }

    /// `Σ q·λ / |q|`.
    pub fn mean_lambda(&self) -> f64 {
        self.entries.iter().map(|e| e.rate * e.lambda() as f64).sum::<f64>() / self.total_rate
    }

    #[inline]
    pub fn choose(&self, u: f64) -> usize {
        let x = u * self.total_rate;
        self.cumulative
            .iter()
            .position(|&c| x < c)
            .unwrap_or(self.entries.len() - 1)
    }

    /// One flat entry per non-identity component, at the entry's rate.
    pub fn flatten(&self) -> Result<MapFamily> {
        self.flatten_with(false)
    }

    /// As [`flatten`](Self::flatten); `keep_identity` retains projection components.
    pub fn flatten_with(&self, keep_identity: bool) -> Result<MapFamily> {
        let mut list = Vec::new();
        for e in &self.entries {
            for (i, c) in e.components.iter().enumerate() {
                if keep_identity || !c.is_identity_at(i) {
                    list.push((c.reduced(), e.rate));
                }
            }
        }
        MapFamily::new(self.space.clone(), list)
    }
}
