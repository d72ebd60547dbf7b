use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EulerError, IntVec, ModelError, StateId, TransitionId, Vass, WalkError};

/// A transition sequence anchored at a start state. The start is stored
/// explicitly so that the empty path still knows where it lives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub start: StateId,
    pub steps: Vec<TransitionId>,
}

impl Path {
    pub fn empty(start: StateId) -> Self {
        Path {
            start,
            steps: Vec::new(),
        }
    }

    pub fn new(start: StateId, steps: Vec<TransitionId>) -> Self {
        Path { start, steps }
    }

    /// Builds a path whose start is the source of the first step.
    pub fn from_steps(vass: &Vass, steps: Vec<TransitionId>) -> Result<Self, ModelError> {
        let first = *steps.first().ok_or(ModelError::EmptyPathWithoutStart)?;
        if first >= vass.num_transitions() {
            return Err(ModelError::UnknownTransition(first));
        }
        let path = Path {
            start: vass.transition(first).src,
            steps,
        };
        path.check(vass)?;
        Ok(path)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Verifies that consecutive steps chain and returns the end state.
    pub fn check(&self, vass: &Vass) -> Result<StateId, ModelError> {
        if self.start >= vass.num_states() {
            return Err(ModelError::UnknownState(self.start));
        }
        let mut cur = self.start;
        for (i, &t) in self.steps.iter().enumerate() {
            if t >= vass.num_transitions() {
                return Err(ModelError::UnknownTransition(t));
            }
            let tr = vass.transition(t);
            if tr.src != cur {
                return Err(ModelError::Unchained { step: i + 1 });
            }
            cur = tr.dst;
        }
        Ok(cur)
    }

    pub fn end(&self, vass: &Vass) -> Result<StateId, ModelError> {
        self.check(vass)
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &Path) {
        self.steps.extend_from_slice(&other.steps);
    }

    pub fn repeat(&self, times: usize) -> Path {
        let mut steps = Vec::with_capacity(self.steps.len() * times);
        for _ in 0..times {
            steps.extend_from_slice(&self.steps);
        }
        Path {
            start: self.start,
            steps,
        }
    }
}

/// A state together with a location in the first orthant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub state: StateId,
    pub location: IntVec,
}

impl Configuration {
    pub fn new(state: StateId, location: IntVec) -> Result<Self, ModelError> {
        if !location.is_nonneg() {
            return Err(ModelError::NegativeLocation(location));
        }
        Ok(Configuration { state, location })
    }
}

/// Edge-occurrence counts. Zero counts are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParikhImage(BTreeMap<TransitionId, u64>);

impl ParikhImage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, t: TransitionId) -> u64 {
        self.0.get(&t).copied().unwrap_or(0)
    }

    pub fn set(&mut self, t: TransitionId, count: u64) {
        if count == 0 {
            self.0.remove(&t);
        } else {
            self.0.insert(t, count);
        }
    }

    pub fn add(&mut self, t: TransitionId, count: u64) {
        let c = self.get(t) + count;
        self.set(t, c);
    }

    pub fn iter(&self) -> impl Iterator<Item = (TransitionId, u64)> + '_ {
        self.0.iter().map(|(&t, &c)| (t, c))
    }

    pub fn support(&self) -> impl Iterator<Item = TransitionId> + '_ {
        self.0.keys().copied()
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn displacement(&self, vass: &Vass) -> IntVec {
        let mut d = IntVec::zeros(vass.dim());
        for (t, c) in self.iter() {
            d.add_scaled(&vass.transition(t).delta, c as i64);
        }
        d
    }
}

impl FromIterator<(TransitionId, u64)> for ParikhImage {
    fn from_iter<I: IntoIterator<Item = (TransitionId, u64)>>(iter: I) -> Self {
        let mut p = ParikhImage::new();
        for (t, c) in iter {
            p.add(t, c);
        }
        p
    }
}

/// A path that was checked to stay in the first orthant, with its
/// endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub start: Configuration,
    pub path: Path,
    pub end: Configuration,
}

pub fn displacement(path: &Path, vass: &Vass) -> Result<IntVec, ModelError> {
    path.check(vass)?;
    let mut d = IntVec::zeros(vass.dim());
    for &t in &path.steps {
        d.add_assign(&vass.transition(t).delta);
    }
    Ok(d)
}

/// Entrywise minimum over all nonempty prefixes of the prefix sums. The
/// empty path maps to the zero vector.
pub fn delta_min(path: &Path, vass: &Vass) -> Result<IntVec, ModelError> {
    path.check(vass)?;
    Ok(delta_min_of(
        vass.dim(),
        path.steps.iter().map(|&t| &vass.transition(t).delta),
    ))
}

/// [`delta_min`] over a bare displacement sequence.
pub fn delta_min_of<'a>(dim: usize, deltas: impl IntoIterator<Item = &'a IntVec>) -> IntVec {
    let mut sum = IntVec::zeros(dim);
    let mut min: Option<IntVec> = None;
    for d in deltas {
        sum.add_assign(d);
        min = Some(match min {
            None => sum.clone(),
            Some(m) => m.meet(&sum),
        });
    }
    min.unwrap_or_else(|| IntVec::zeros(dim))
}

/// Replays `path` from `start` and fails at the first step that leaves the
/// first orthant.
pub fn validate_walk(
    vass: &Vass,
    start: &Configuration,
    path: &Path,
) -> Result<Configuration, WalkError> {
    if path.start != start.state {
        return Err(WalkError::StartMismatch {
            path_start: path.start,
            state: start.state,
        });
    }
    path.check(vass)?;
    if start.location.dim() != vass.dim() {
        return Err(ModelError::DimensionMismatch {
            expected: vass.dim(),
            found: start.location.dim(),
        }
        .into());
    }
    let mut loc = start.location.clone();
    if !loc.is_nonneg() {
        return Err(WalkError::Negative {
            step: 0,
            location: loc,
        });
    }
    let mut state = start.state;
    for (i, &t) in path.steps.iter().enumerate() {
        let tr = vass.transition(t);
        loc = loc
            .checked_add(&tr.delta)
            .ok_or(WalkError::Overflow { step: i + 1 })?;
        if !loc.is_nonneg() {
            return Err(WalkError::Negative {
                step: i + 1,
                location: loc,
            });
        }
        state = tr.dst;
    }
    Ok(Configuration {
        state,
        location: loc,
    })
}

pub fn parikh(path: &Path) -> ParikhImage {
    path.steps.iter().map(|&t| (t, 1)).collect()
}

/// Extracts a path from `entry` to `exit` whose Parikh image is `psi`
/// (Hierholzer, lowest transition id first).
pub fn realize_parikh(
    graph: &Vass,
    entry: StateId,
    exit: StateId,
    psi: &ParikhImage,
) -> Result<Path, EulerError> {
    let n = graph.num_states();
    for s in [entry, exit] {
        if s >= n {
            return Err(ModelError::UnknownState(s).into());
        }
    }
    let mut balance = vec![0i64; n];
    for (t, c) in psi.iter() {
        if t >= graph.num_transitions() {
            return Err(ModelError::UnknownTransition(t).into());
        }
        let tr = graph.transition(t);
        balance[tr.src] += c as i64;
        balance[tr.dst] -= c as i64;
    }
    // out - in must be +1 at entry and -1 at exit (0 everywhere if they coincide)
    balance[entry] -= 1;
    balance[exit] += 1;
    if let Some(s) = balance.iter().position(|&b| b != 0) {
        return Err(EulerError::Imbalance { state: s });
    }

    let mut remaining: Vec<u64> = (0..graph.num_transitions()).map(|t| psi.get(t)).collect();
    let adj = graph.adjacency();
    let mut cursor = vec![0usize; n];
    let mut stack: Vec<(StateId, Option<TransitionId>)> = vec![(entry, None)];
    let mut circuit = Vec::with_capacity(psi.total() as usize);
    while let Some(&(s, _)) = stack.last() {
        let mut advanced = false;
        while cursor[s] < adj[s].len() {
            let t = adj[s][cursor[s]];
            if remaining[t] > 0 {
                remaining[t] -= 1;
                stack.push((graph.transition(t).dst, Some(t)));
                advanced = true;
                break;
            }
            cursor[s] += 1;
        }
        if !advanced {
            let (_, t) = stack.pop().expect("stack is nonempty");
            if let Some(t) = t {
                circuit.push(t);
            }
        }
    }
    if remaining.iter().any(|&c| c > 0) {
        return Err(EulerError::Disconnected);
    }
    circuit.reverse();
    Ok(Path {
        start: entry,
        steps: circuit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_2d() -> Vass {
        let mut v = Vass::new(2).unwrap();
        let p = v.add_state("p");
        v.add_transition(p, p, IntVec::from([1, -2])).unwrap();
        v.add_transition(p, p, IntVec::from([-3, 1])).unwrap();
        v
    }

    #[test]
    fn displacement_examples() {
        let v = line_2d();
        assert_eq!(displacement(&Path::empty(0), &v).unwrap(), IntVec::zeros(2));
        assert_eq!(
            displacement(&Path::new(0, vec![0]), &v).unwrap(),
            IntVec::from([1, -2])
        );
        assert_eq!(
            displacement(&Path::new(0, vec![0, 1]), &v).unwrap(),
            IntVec::from([-2, -1])
        );
    }

    #[test]
    fn delta_min_examples() {
        let v = line_2d();
        assert_eq!(
            delta_min(&Path::new(0, vec![0, 1]), &v).unwrap(),
            IntVec::from([-2, -2])
        );
        assert_eq!(delta_min(&Path::empty(0), &v).unwrap(), IntVec::zeros(2));
        let mut w = Vass::new(2).unwrap();
        let p = w.add_state("p");
        w.add_transition(p, p, IntVec::from([5, 0])).unwrap();
        assert_eq!(
            delta_min(&Path::new(0, vec![0]), &w).unwrap(),
            IntVec::from([5, 0])
        );
    }

    #[test]
    fn unchained_path_is_rejected() {
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        let q = v.add_state("q");
        v.add_transition(p, q, IntVec::from([1])).unwrap();
        let err = displacement(&Path::new(p, vec![0, 0]), &v).unwrap_err();
        assert_eq!(err, ModelError::Unchained { step: 2 });
    }

    #[test]
    fn validate_walk_examples() {
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        v.add_transition(p, p, IntVec::from([1])).unwrap();
        v.add_transition(p, p, IntVec::from([-1])).unwrap();
        let start = Configuration::new(p, IntVec::from([0])).unwrap();
        let end = validate_walk(&v, &start, &Path::new(p, vec![0, 0, 0])).unwrap();
        assert_eq!(end.location, IntVec::from([3]));
        let err = validate_walk(&v, &start, &Path::new(p, vec![1])).unwrap_err();
        assert!(matches!(err, WalkError::Negative { step: 1, .. }));

        let mut w = Vass::new(2).unwrap();
        let p = w.add_state("p");
        w.add_transition(p, p, IntVec::from([-1, 1])).unwrap();
        w.add_transition(p, p, IntVec::from([1, -1])).unwrap();
        let start = Configuration::new(p, IntVec::from([2, 0])).unwrap();
        let end = validate_walk(&w, &start, &Path::new(p, vec![0, 0, 1])).unwrap();
        assert_eq!(end.location, IntVec::from([1, 1]));
    }

    fn two_cycle() -> Vass {
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        let q = v.add_state("q");
        v.add_transition(p, q, IntVec::from([1])).unwrap();
        v.add_transition(q, p, IntVec::from([-1])).unwrap();
        v
    }

    #[test]
    fn realize_examples() {
        let v = two_cycle();
        let psi: ParikhImage = [(0, 1), (1, 1)].into_iter().collect();
        let path = realize_parikh(&v, 0, 0, &psi).unwrap();
        assert_eq!(path.steps, vec![0, 1]);

        let psi: ParikhImage = [(0, 2), (1, 1)].into_iter().collect();
        let path = realize_parikh(&v, 0, 1, &psi).unwrap();
        assert_eq!(path.steps, vec![0, 1, 0]);
        assert_eq!(parikh(&path), psi);

        let psi: ParikhImage = [(0, 1)].into_iter().collect();
        assert!(matches!(
            realize_parikh(&v, 0, 0, &psi),
            Err(EulerError::Imbalance { .. })
        ));
    }

    #[test]
    fn realize_detects_disconnected_support() {
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        let q = v.add_state("q");
        v.add_transition(p, p, IntVec::from([1])).unwrap();
        v.add_transition(q, q, IntVec::from([1])).unwrap();
        let psi: ParikhImage = [(0, 1), (1, 1)].into_iter().collect();
        assert_eq!(
            realize_parikh(&v, p, p, &psi),
            Err(EulerError::Disconnected)
        );
        let _ = q;
    }

    #[test]
    fn empty_image_realizes_empty_path() {
        let v = two_cycle();
        let path = realize_parikh(&v, 1, 1, &ParikhImage::new()).unwrap();
        assert!(path.is_empty());
        assert_eq!(path.start, 1);
    }
}
