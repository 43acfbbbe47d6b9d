//! Hider distributions and searcher policies.
//!
//! Every searcher policy is a small state machine: given the searcher's
//! [`InfoState`] and the policy's own [`PolicyState`], [`SearcherPolicy::decide`]
//! returns an explicit distribution over `(box to open, next policy state)`.
//! All randomization is spelled out as weighted branches, which lets the
//! engine compute exact expectations and lets `play` sample.

mod hider;
mod normal;
mod searcher;

pub use hider::*;
pub use normal::*;
pub use searcher::*;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{CostVector, InfoState, Instance, LookMode};
use crate::scalar::Scalar;
use crate::solver::DecisionTreePolicy;

/// Internal memory a policy carries between opens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyState {
    Start,
    /// Keep opening `bx` while it is live and `left > 0`.
    Commit {
        bx: usize,
        left: u32,
    },
    /// Two-box cost game: opens of box 1 still owed before the mixture.
    SetAside(u32),
    /// Two-box cost game: opens of box 1 left before switching to box 2.
    Budget(u32),
    /// Recursive regret search over boxes `1..=m` expecting `quota` balls.
    Level {
        m: usize,
        quota: u32,
    },
    /// Opening box `m` until `s` balls are found there or it turns out empty.
    Opening {
        m: usize,
        quota: u32,
        s: u32,
    },
    /// Position in sequence `idx` of a normal strategy.
    Sequence {
        idx: usize,
        pos: usize,
    },
    /// Box chosen to be opened last.
    LastBox(usize),
    /// Most recently opened box (random policies).
    After(Option<usize>),
}

/// One outcome of a policy's randomization.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub prob: T,
    pub open: usize,
    pub next: PolicyState,
}

/// An adaptive, possibly randomized searcher strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum SearcherPolicy<T> {
    /// Uniform over every box that may still hold a ball.
    UniformAdaptive,
    /// Pick a live box uniformly, commit to it for up to `j` opens with
    /// `p_j = lambda (k' + 1 - j)`, repeat.
    EqualCost,
    /// Two boxes, `c1 >= c2`: open box 1 up to `set_aside` times, then open
    /// box 1 at most `j` times first with probability `q[j]`.
    N2Cost {
        set_aside: u32,
        q: Vec<T>,
    },
    /// Recursive last-box-first regret search; `draws[m][quota][s]` is the
    /// probability of opening box `m` for up to `s` balls.
    MultiRegret {
        draws: Vec<Vec<Vec<T>>>,
    },
    Normal(NormalStrategy<T>),
    /// Single-look, `k = n - 1`, costs non-increasing: open boxes
    /// `b+1..=n` first, then leave box `j <= b` for last with probability
    /// `last[j]`.
    SingleRegretFull {
        b: usize,
        last: Vec<T>,
    },
    /// Pseudo-random admissible choices keyed on the info state.
    Random {
        seed: u64,
    },
    DecisionTree(DecisionTreePolicy),
    /// `inner` plays on relabeled boxes: its box `c` is box `perm[c]` here.
    Relabeled {
        perm: Vec<usize>,
        inner: Box<SearcherPolicy<T>>,
    },
}

impl<T: Scalar> SearcherPolicy<T> {
    pub fn start(&self) -> PolicyState {
        match self {
            SearcherPolicy::Random { .. } => PolicyState::After(None),
            SearcherPolicy::N2Cost { set_aside, .. } => PolicyState::SetAside(*set_aside),
            SearcherPolicy::MultiRegret { draws } => {
                let m = draws.len() - 1;
                PolicyState::Level {
                    m,
                    quota: draws[m].len() as u32 - 1,
                }
            }
            SearcherPolicy::Relabeled { inner, .. } => inner.start(),
            _ => PolicyState::Start,
        }
    }

    /// Policies whose choice depends only on the info state; evaluation can
    /// share work across histories for these.
    pub fn is_markov(&self) -> bool {
        match self {
            SearcherPolicy::UniformAdaptive | SearcherPolicy::DecisionTree(_) => true,
            SearcherPolicy::Relabeled { inner, .. } => inner.is_markov(),
            _ => false,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SearcherPolicy::UniformAdaptive => "uniform-adaptive",
            SearcherPolicy::EqualCost => "equal-cost",
            SearcherPolicy::N2Cost { .. } => "n2-cost",
            SearcherPolicy::MultiRegret { .. } => "multi-regret",
            SearcherPolicy::Normal(_) => "normal",
            SearcherPolicy::SingleRegretFull { .. } => "single-regret-full",
            SearcherPolicy::Random { .. } => "random",
            SearcherPolicy::DecisionTree(_) => "decision-tree",
            SearcherPolicy::Relabeled { .. } => "relabeled",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SearcherPolicy::UniformAdaptive => "uniform over boxes that may hold a ball".into(),
            SearcherPolicy::EqualCost => "uniform box, commit for j opens with p_j = λ(k'+1-j)".into(),
            SearcherPolicy::N2Cost { set_aside, q } => {
                format!(
                    "open box 1 up to {set_aside} times, then box 1 at most j times w.p. q_{}(j)",
                    q.len() - 1
                )
            }
            SearcherPolicy::MultiRegret { draws } => {
                format!("recursive regret search over {} boxes", draws.len() - 1)
            }
            SearcherPolicy::Normal(m) => format!("normal strategy over {} sequences", m.mixture().len()),
            SearcherPolicy::SingleRegretFull { b, .. } => {
                format!("open boxes {}.. first, then last-box mixture over 1..={b}", b + 1)
            }
            SearcherPolicy::Random { seed } => format!("random admissible policy (seed {seed})"),
            SearcherPolicy::DecisionTree(t) => format!("decision tree over {} info states", t.len()),
            SearcherPolicy::Relabeled { inner, .. } => format!("{} (relabeled boxes)", inner.describe()),
        }
    }

    /// Distribution over the next open. `k` is the total number of balls.
    ///
    /// Called only at non-terminal states. Branches with zero probability
    /// are omitted.
    pub fn decide(&self, info: &InfoState, state: &PolicyState, k: u32, look: LookMode) -> Result<Vec<Branch<T>>> {
        match self {
            SearcherPolicy::UniformAdaptive => {
                let boxes = nonempty(info.admissible_boxes(look))?;
                let p = T::ratio(1, boxes.len() as u64);
                Ok(boxes
                    .into_iter()
                    .map(|open| Branch {
                        prob: p.clone(),
                        open,
                        next: PolicyState::Start,
                    })
                    .collect())
            }
            SearcherPolicy::EqualCost => decide_equal_cost(info, state, k, look),
            SearcherPolicy::N2Cost { q, .. } => decide_n2(q, info, state),
            SearcherPolicy::MultiRegret { draws } => decide_multi_regret(draws, info, state, look),
            SearcherPolicy::Normal(m) => decide_normal(m, info, state, look),
            SearcherPolicy::SingleRegretFull { b, last } => decide_single_full(*b, last, info, state, look),
            SearcherPolicy::Random { seed } => decide_random(*seed, info, state, look),
            SearcherPolicy::DecisionTree(tree) => {
                let open = tree
                    .action(info)
                    .ok_or_else(|| Error::PolicyViolation(format!("decision tree has no action at {info:?}")))?;
                Ok(vec![Branch {
                    prob: T::one(),
                    open,
                    next: PolicyState::Start,
                }])
            }
            SearcherPolicy::Relabeled { perm, inner } => {
                let view = info.permuted(perm);
                Ok(inner
                    .decide(&view, state, k, look)?
                    .into_iter()
                    .map(|b| Branch {
                        open: perm[b.open],
                        ..b
                    })
                    .collect())
            }
        }
    }

    /// Wraps a policy built for costs sorted non-increasingly so it plays on
    /// the original box order. `perm` is as returned by [`canonicalize`].
    pub fn relabeled(self, perm: Vec<usize>) -> Self {
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return self;
        }
        SearcherPolicy::Relabeled {
            perm,
            inner: Box::new(self),
        }
    }

    /// JSON with a `kind` tag. Policies derived from an instance carry their
    /// parameters for reference; explicit ones (normal, decision tree,
    /// random) carry everything needed to rebuild them.
    pub fn to_json(&self) -> Value {
        let mut v = match self {
            SearcherPolicy::N2Cost { set_aside, q } => json!({
                "set_aside": set_aside,
                "q": q.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            }),
            SearcherPolicy::SingleRegretFull { b, last } => json!({
                "b": b,
                "last_box": last.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            }),
            SearcherPolicy::Normal(m) => json!({
                "n": m.n(),
                "k": m.k(),
                "look": m.look(),
                "mixture": m.mixture().iter().map(|(s, p)| json!({
                    "seq": s.boxes().iter().map(|b| b + 1).collect::<Vec<_>>(),
                    "prob": p.to_json(),
                })).collect::<Vec<_>>(),
            }),
            SearcherPolicy::Random { seed } => json!({ "seed": seed }),
            SearcherPolicy::DecisionTree(t) => t.to_json(),
            SearcherPolicy::Relabeled { perm, inner } => json!({
                "perm": perm.iter().map(|p| p + 1).collect::<Vec<_>>(),
                "inner": inner.to_json(),
            }),
            _ => json!({}),
        };
        v["kind"] = json!(self.kind());
        v["description"] = json!(self.describe());
        v
    }

    /// Rebuilds a policy. Instance-derived kinds are reconstructed from
    /// `inst`, re-sorting boxes when the kind needs a cost order.
    pub fn from_json(v: &Value, inst: &Instance<T>) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("strategy: {what}"));
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing kind"))?;
        let (n, k) = (inst.n(), inst.k);
        match kind {
            "uniform-adaptive" => Ok(searcher_uniform_adaptive()),
            "equal-cost" => searcher_equal_cost(n, k),
            "n2-cost" => searcher_n2_cost_any(&inst.costs, k),
            "multi-regret" => Ok(searcher_multi_regret(&inst.costs, k)),
            "single-regret-full" => searcher_single_regret_full_any(&inst.costs, k),
            "normal-k1" => Ok(SearcherPolicy::Normal(searcher_normal_k1(
                &inst.costs,
                inst.variant.look,
            )?)),
            "normal-k2" => searcher_normal_k2(&inst.costs),
            "normal" => {
                let look = match v.get("look") {
                    Some(l) => serde_json::from_value(l.clone()).map_err(|e| bad(&e.to_string()))?,
                    None => inst.variant.look,
                };
                let entries = v
                    .get("mixture")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("missing mixture"))?;
                let mut mix = Vec::new();
                for e in entries {
                    let seq: Vec<usize> = serde_json::from_value(e.get("seq").cloned().unwrap_or(Value::Null))
                        .map_err(|e| bad(&e.to_string()))?;
                    let p = T::from_json(e.get("prob").ok_or_else(|| bad("missing prob"))?)?;
                    mix.push((SearchSequence::from_one_based(&seq, n, k, look)?, p));
                }
                Ok(SearcherPolicy::Normal(NormalStrategy::new(n, k, look, mix)?))
            }
            "random" => Ok(SearcherPolicy::Random {
                seed: v
                    .get("seed")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("missing seed"))?,
            }),
            "decision-tree" => Ok(SearcherPolicy::DecisionTree(DecisionTreePolicy::from_json(v)?)),
            "relabeled" => {
                let perm: Vec<usize> = serde_json::from_value(v.get("perm").cloned().unwrap_or(Value::Null))
                    .map_err(|e| bad(&e.to_string()))?;
                let mut sorted = perm.clone();
                sorted.sort_unstable();
                if sorted != (1..=n).collect::<Vec<_>>() {
                    return Err(bad("perm must list boxes 1..=n once each"));
                }
                let perm: Vec<usize> = perm.iter().map(|p| p - 1).collect();
                // The inner policy plays on the relabeled boxes.
                let costs = CostVector::new(perm.iter().map(|&p| inst.costs.get(p).clone()).collect())?;
                let view = Instance::new(costs, k, inst.variant)?;
                let inner = Self::from_json(v.get("inner").ok_or_else(|| bad("missing inner"))?, &view)?;
                Ok(SearcherPolicy::Relabeled {
                    perm,
                    inner: Box::new(inner),
                })
            }
            other => Err(bad(&format!("unknown kind {other:?}"))),
        }
    }
}

fn nonempty(boxes: Vec<usize>) -> Result<Vec<usize>> {
    if boxes.is_empty() {
        Err(Error::PolicyViolation("no admissible box left".into()))
    } else {
        Ok(boxes)
    }
}

fn lowest_admissible(info: &InfoState, look: LookMode) -> Result<usize> {
    (0..info.n())
        .find(|&i| info.admissible(i, look))
        .ok_or_else(|| Error::PolicyViolation("no admissible box left".into()))
}

fn decide_equal_cost<T: Scalar>(
    info: &InfoState,
    state: &PolicyState,
    k: u32,
    look: LookMode,
) -> Result<Vec<Branch<T>>> {
    if let PolicyState::Commit { bx, left } = *state {
        if left > 0 && info.admissible(bx, look) {
            return Ok(vec![Branch {
                prob: T::one(),
                open: bx,
                next: PolicyState::Commit { bx, left: left - 1 },
            }]);
        }
    }
    let boxes = nonempty(info.admissible_boxes(look))?;
    let weights = equal_cost_commit_probs::<T>(info.remaining(k));
    let share = T::ratio(1, boxes.len() as u64);
    let mut out = Vec::with_capacity(boxes.len() * weights.len());
    for &bx in &boxes {
        for (j, p) in weights.iter().enumerate() {
            out.push(Branch {
                prob: share.clone() * p.clone(),
                open: bx,
                next: PolicyState::Commit { bx, left: j as u32 },
            });
        }
    }
    Ok(out)
}

fn decide_n2<T: Scalar>(q: &[T], info: &InfoState, state: &PolicyState) -> Result<Vec<Branch<T>>> {
    let budget_step = |left: u32| -> Branch<T> {
        if left > 0 && !info.dead[0] {
            Branch {
                prob: T::one(),
                open: 0,
                next: PolicyState::Budget(left - 1),
            }
        } else if !info.dead[1] {
            Branch {
                prob: T::one(),
                open: 1,
                next: PolicyState::Budget(0),
            }
        } else {
            Branch {
                prob: T::one(),
                open: 0,
                next: PolicyState::Budget(0),
            }
        }
    };
    match *state {
        PolicyState::SetAside(left) if left > 0 => {
            if info.dead[0] {
                Ok(vec![budget_step(0)])
            } else {
                Ok(vec![Branch {
                    prob: T::one(),
                    open: 0,
                    next: PolicyState::SetAside(left - 1),
                }])
            }
        }
        PolicyState::SetAside(_) => Ok(q
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| Branch {
                prob: p.clone(),
                ..budget_step(j as u32)
            })
            .collect()),
        PolicyState::Budget(left) => Ok(vec![budget_step(left)]),
        ref other => Err(Error::PolicyViolation(format!(
            "n2-cost policy in foreign state {other:?}"
        ))),
    }
}

fn decide_multi_regret<T: Scalar>(
    draws: &[Vec<Vec<T>>],
    info: &InfoState,
    state: &PolicyState,
    look: LookMode,
) -> Result<Vec<Branch<T>>> {
    match *state {
        // Boxes 1..=m exhausted short of their quota: return to the most
        // recently set-aside box, which is the lowest live one.
        PolicyState::Level { m: 0, quota } => {
            let open = lowest_admissible(info, look)?;
            Ok(vec![Branch {
                prob: T::one(),
                open,
                next: PolicyState::Level { m: 0, quota },
            }])
        }
        PolicyState::Level { m: 1, quota } => {
            decide_multi_regret(draws, info, &PolicyState::Opening { m: 1, quota, s: quota }, look)
        }
        PolicyState::Level { m, quota } => {
            let mut out = Vec::new();
            for (s, p) in draws[m][quota as usize].iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let next = PolicyState::Opening { m, quota, s: s as u32 };
                for b in decide_multi_regret(draws, info, &next, look)? {
                    out.push(Branch {
                        prob: p.clone() * b.prob,
                        ..b
                    });
                }
            }
            Ok(out)
        }
        PolicyState::Opening { m, quota, s } => {
            let bx = m - 1;
            let t = info.found[bx];
            if info.dead[bx] {
                decide_multi_regret(
                    draws,
                    info,
                    &PolicyState::Level {
                        m: m - 1,
                        quota: quota - t,
                    },
                    look,
                )
            } else if t >= s {
                decide_multi_regret(
                    draws,
                    info,
                    &PolicyState::Level {
                        m: m - 1,
                        quota: quota - s,
                    },
                    look,
                )
            } else {
                Ok(vec![Branch {
                    prob: T::one(),
                    open: bx,
                    next: state.clone(),
                }])
            }
        }
        ref other => Err(Error::PolicyViolation(format!(
            "multi-regret policy in foreign state {other:?}"
        ))),
    }
}

fn decide_normal<T: Scalar>(
    m: &NormalStrategy<T>,
    info: &InfoState,
    state: &PolicyState,
    look: LookMode,
) -> Result<Vec<Branch<T>>> {
    let step = |idx: usize, pos: usize| -> Result<Branch<T>> {
        let seq = m.mixture()[idx].0.boxes();
        let at = (pos..seq.len())
            .find(|&p| info.admissible(seq[p], look))
            .ok_or_else(|| Error::PolicyViolation(format!("sequence {} ran out", m.mixture()[idx].0)))?;
        Ok(Branch {
            prob: T::one(),
            open: seq[at],
            next: PolicyState::Sequence { idx, pos: at + 1 },
        })
    };
    match *state {
        PolicyState::Start => m
            .mixture()
            .iter()
            .enumerate()
            .map(|(idx, (_, p))| {
                Ok(Branch {
                    prob: p.clone(),
                    ..step(idx, 0)?
                })
            })
            .collect(),
        PolicyState::Sequence { idx, pos } => Ok(vec![step(idx, pos)?]),
        ref other => Err(Error::PolicyViolation(format!(
            "normal strategy in foreign state {other:?}"
        ))),
    }
}

fn decide_single_full<T: Scalar>(
    b: usize,
    last: &[T],
    info: &InfoState,
    state: &PolicyState,
    look: LookMode,
) -> Result<Vec<Branch<T>>> {
    let finish = |j: usize| -> Result<Branch<T>> {
        let open = (0..info.n())
            .find(|&i| i != j && info.admissible(i, look))
            .or_else(|| info.admissible(j, look).then_some(j))
            .ok_or_else(|| Error::PolicyViolation("no admissible box left".into()))?;
        Ok(Branch {
            prob: T::one(),
            open,
            next: PolicyState::LastBox(j),
        })
    };
    if let PolicyState::LastBox(j) = *state {
        return Ok(vec![finish(j)?]);
    }
    if info.dead.iter().any(|&d| d) {
        let open = lowest_admissible(info, look)?;
        return Ok(vec![Branch {
            prob: T::one(),
            open,
            next: PolicyState::Start,
        }]);
    }
    if let Some(open) = (b..info.n()).find(|&i| info.admissible(i, look)) {
        return Ok(vec![Branch {
            prob: T::one(),
            open,
            next: PolicyState::Start,
        }]);
    }
    last.iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(j, p)| {
            Ok(Branch {
                prob: p.clone(),
                ..finish(j)?
            })
        })
        .collect()
}

fn decide_random<T: Scalar>(
    seed: u64,
    info: &InfoState,
    state: &PolicyState,
    look: LookMode,
) -> Result<Vec<Branch<T>>> {
    let boxes = nonempty(info.admissible_boxes(look))?;
    let last = match state {
        PolicyState::After(l) => *l,
        _ => None,
    };
    let mut key = Vec::with_capacity(2 * info.n() + 2);
    key.extend(info.found.iter().map(|&f| f as u64));
    key.extend(info.dead.iter().map(|&d| d as u64));
    key.push(last.map_or(u64::MAX, |l| l as u64));
    let mut weights: Vec<u64> = boxes
        .iter()
        .map(|&b| {
            key.push(b as u64);
            let h = mix(seed, &key);
            key.pop();
            h % 4
        })
        .collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: u64 = weights.iter().sum();
    Ok(boxes
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0)
        .map(|(open, w)| Branch {
            prob: T::ratio(w, total),
            open,
            next: PolicyState::After(Some(open)),
        })
        .collect())
}

/// FNV-1a over little-endian words, stable across platforms and releases.
fn mix(seed: u64, words: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h ^ (h >> 29)
}
