use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::dsl::CkabSpec;
use crate::engine::HeadTerm;
use crate::kb::{Term, Ucq};

/// Argument `index` (1-based) of predicate `pred`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Position {
    pub pred: String,
    pub index: usize,
}

impl Position {
    pub fn new(pred: impl Into<String>, index: usize) -> Self {
        Position {
            pred: pred.into(),
            index,
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.pred, self.index)
    }
}

/// Value flow between predicate positions. Special edges carry values
/// through a service call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    nodes: BTreeSet<Position>,
    normal: BTreeSet<(Position, Position)>,
    special: BTreeSet<(Position, Position)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AcyclicityReport {
    pub weakly_acyclic: bool,
    /// Positions of a cycle through a special edge, starting with that
    /// edge's source and ending where it started.
    pub cycle: Option<Vec<Position>>,
}

impl fmt::Display for AcyclicityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.cycle {
            None => write!(f, "weakly acyclic"),
            Some(c) => {
                let parts: Vec<String> = c.iter().map(Position::to_string).collect();
                write!(f, "not weakly acyclic: cycle {}", parts.join(" -> "))
            }
        }
    }
}

impl DependencyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, p: Position) {
        self.nodes.insert(p);
    }

    pub fn add_edge(&mut self, from: Position, to: Position, special: bool) {
        self.nodes.insert(from.clone());
        self.nodes.insert(to.clone());
        if special {
            self.special.insert((from, to));
        } else {
            self.normal.insert((from, to));
        }
    }

    pub fn nodes(&self) -> &BTreeSet<Position> {
        &self.nodes
    }

    pub fn normal_edges(&self) -> &BTreeSet<(Position, Position)> {
        &self.normal
    }

    pub fn special_edges(&self) -> &BTreeSet<(Position, Position)> {
        &self.special
    }

    fn adjacency(&self) -> BTreeMap<&Position, Vec<&Position>> {
        let mut adj: BTreeMap<&Position, Vec<&Position>> =
            self.nodes.iter().map(|n| (n, Vec::new())).collect();
        for (a, b) in self.normal.iter().chain(&self.special) {
            adj.get_mut(a).unwrap().push(b);
        }
        adj
    }

    /// A cycle containing a special edge, if one exists: the special edge
    /// `u -> v` followed by a shortest path from `v` back to `u`.
    pub fn special_cycle(&self) -> Option<Vec<Position>> {
        let adj = self.adjacency();
        for (u, v) in &self.special {
            if let Some(back) = shortest_path(&adj, v, u) {
                let mut cycle = vec![u.clone()];
                cycle.extend(back.into_iter().cloned());
                return Some(cycle);
            }
        }
        None
    }
}

fn shortest_path<'a>(
    adj: &BTreeMap<&'a Position, Vec<&'a Position>>,
    from: &'a Position,
    to: &'a Position,
) -> Option<Vec<&'a Position>> {
    let mut parent: BTreeMap<&Position, &Position> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    parent.insert(from, from);
    while let Some(n) = queue.pop_front() {
        if n == to {
            let mut path = vec![n];
            let mut cur = n;
            while cur != from {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &m in &adj[n] {
            if !parent.contains_key(m) {
                parent.insert(m, n);
                queue.push_back(m);
            }
        }
    }
    None
}

fn positions_of<'a>(
    atoms: impl Iterator<Item = &'a crate::kb::Atom<Term>>,
    var: &str,
) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    for a in atoms {
        for (i, t) in a.args.iter().enumerate() {
            if t.as_var() == Some(var) {
                out.insert(Position::new(a.pred.clone(), i + 1));
            }
        }
    }
    out
}

fn ucq_atoms(q: &Ucq) -> impl Iterator<Item = &crate::kb::Atom<Term>> {
    q.disjuncts().iter().flat_map(|d| d.atoms.iter())
}

fn mentions(t: &HeadTerm, var: &str) -> bool {
    match t {
        HeadTerm::Var(v) => v == var,
        HeadTerm::Const(_) => false,
        HeadTerm::Call(_, args) => args.iter().any(|a| mentions(a, var)),
    }
}

/// The position graph of a specification. Variables flow from their
/// positions in an effect body, or for action parameters from their
/// positions in the queries of rules invoking the action.
pub fn dependency_graph(spec: &CkabSpec) -> DependencyGraph {
    let mut g = DependencyGraph::new();
    let (concepts, roles) = spec.vocabulary();
    for c in concepts {
        g.add_node(Position::new(c, 1));
    }
    for r in roles {
        g.add_node(Position::new(r.clone(), 1));
        g.add_node(Position::new(r, 2));
    }
    for action in &spec.actions {
        let mut param_sources: BTreeMap<&str, BTreeSet<Position>> = BTreeMap::new();
        for rule in spec.process.iter().filter(|r| r.action == action.name) {
            for (param, arg) in action.params.iter().zip(&rule.args) {
                let found = rule
                    .query
                    .ucqs()
                    .into_iter()
                    .flat_map(|u| positions_of(ucq_atoms(u), arg))
                    .collect::<BTreeSet<_>>();
                param_sources.entry(param).or_default().extend(found);
            }
        }
        for effect in &action.effects {
            let mut vars: BTreeSet<&str> = BTreeSet::new();
            for a in &effect.head {
                for t in &a.args {
                    vars.extend(t.vars());
                }
            }
            for var in vars {
                let mut sources = positions_of(ucq_atoms(&effect.qplus), var);
                if let Some(ps) = param_sources.get(var) {
                    sources.extend(ps.iter().cloned());
                }
                for a in &effect.head {
                    for (i, t) in a.args.iter().enumerate() {
                        let target = Position::new(a.pred.clone(), i + 1);
                        let special = match t {
                            HeadTerm::Var(v) if v == var => false,
                            HeadTerm::Call(..) if mentions(t, var) => true,
                            _ => continue,
                        };
                        for s in &sources {
                            g.add_edge(s.clone(), target.clone(), special);
                        }
                    }
                }
            }
        }
    }
    g
}

/// Whether no cycle of the position graph goes through a special edge.
pub fn check_weak_acyclicity(spec: &CkabSpec) -> AcyclicityReport {
    let cycle = dependency_graph(spec).special_cycle();
    AcyclicityReport {
        weakly_acyclic: cycle.is_none(),
        cycle,
    }
}
