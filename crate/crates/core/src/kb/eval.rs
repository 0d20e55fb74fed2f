use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::rewrite::{rewrite_ucq, RewrittenUcq};
use super::syntax::{ABox, AnswerSet, Atom, Ecq, Fact, Substitution, TBox, Term, Ucq};
use super::Reasoner;

/// Facts grouped by predicate, for matching query atoms.
pub struct AboxIndex<'a> {
    by_pred: HashMap<&'a str, Vec<&'a Fact>>,
}

impl<'a> AboxIndex<'a> {
    pub fn new(abox: &'a ABox) -> Self {
        let mut by_pred: HashMap<&'a str, Vec<&'a Fact>> = HashMap::new();
        for f in abox {
            by_pred.entry(f.pred.as_str()).or_default().push(f);
        }
        AboxIndex { by_pred }
    }

    /// Adds to `out` the image of `head` under every match of `atoms`.
    pub fn answers(&self, atoms: &[Atom<Term>], head: &[Term], out: &mut BTreeSet<Vec<String>>) {
        if atoms
            .iter()
            .any(|a| !self.by_pred.contains_key(a.pred.as_str()))
        {
            return;
        }
        let mut binding: HashMap<&str, &str> = HashMap::new();
        let mut remaining: Vec<&Atom<Term>> = atoms.iter().collect();
        self.search(&mut remaining, &mut binding, &mut |b| {
            let tuple = head
                .iter()
                .map(|t| match t {
                    Term::Const(c) => c.clone(),
                    Term::Var(v) => b[v.as_str()].to_string(),
                })
                .collect();
            out.insert(tuple);
        });
    }

    /// Whether `atoms` has at least one match.
    pub fn satisfiable(&self, atoms: &[Atom<Term>]) -> bool {
        let mut found = BTreeSet::new();
        self.answers(atoms, &[], &mut found);
        !found.is_empty()
    }

    fn search<'q>(
        &self,
        remaining: &mut Vec<&'q Atom<Term>>,
        binding: &mut HashMap<&'q str, &'a str>,
        emit: &mut dyn FnMut(&HashMap<&'q str, &'a str>),
    ) {
        if remaining.is_empty() {
            emit(binding);
            return;
        }
        // most constrained atom first
        let pick = (0..remaining.len())
            .max_by_key(|&i| {
                let a = remaining[i];
                let bound = a
                    .args
                    .iter()
                    .filter(|t| match t {
                        Term::Const(_) => true,
                        Term::Var(v) => binding.contains_key(v.as_str()),
                    })
                    .count();
                (
                    bound,
                    usize::MAX - self.by_pred.get(a.pred.as_str()).map_or(0, Vec::len),
                )
            })
            .unwrap();
        let atom = remaining.swap_remove(pick);
        if let Some(facts) = self.by_pred.get(atom.pred.as_str()) {
            for fact in facts {
                if fact.args.len() != atom.args.len() {
                    continue;
                }
                let mut newly: Vec<&'q str> = Vec::new();
                let mut ok = true;
                for (t, c) in atom.args.iter().zip(&fact.args) {
                    match t {
                        Term::Const(k) => {
                            if k != c {
                                ok = false;
                                break;
                            }
                        }
                        Term::Var(v) => match binding.get(v.as_str()) {
                            Some(b) if *b != c.as_str() => {
                                ok = false;
                                break;
                            }
                            Some(_) => {}
                            None => {
                                binding.insert(v.as_str(), c.as_str());
                                newly.push(v.as_str());
                            }
                        },
                    }
                }
                if ok {
                    self.search(remaining, binding, emit);
                }
                for v in newly {
                    binding.remove(v);
                }
            }
        }
        remaining.push(atom);
        let last = remaining.len() - 1;
        remaining.swap(pick, last);
    }
}

/// Certain answers of a UCQ: the rewriting evaluated over the ABox.
pub fn certain_answers_ucq(q: &Ucq, tbox: &TBox, abox: &ABox) -> AnswerSet {
    rewrite_ucq(q, tbox).evaluate(abox)
}

/// Evaluates ECQs over one ABox, computing each embedded UCQ's certain
/// answers at most once.
pub struct EcqEvaluator<'a> {
    tbox: &'a TBox,
    shared: Option<&'a Reasoner>,
    index: AboxIndex<'a>,
    adom: Vec<String>,
    rewritten: HashMap<Ucq, RewrittenUcq>,
    answers: HashMap<Ucq, AnswerSet>,
}

impl<'a> EcqEvaluator<'a> {
    pub fn new(tbox: &'a TBox, abox: &'a ABox) -> Self {
        Self::with_adom(tbox, abox, abox.adom().into_iter().collect())
    }

    /// Uses an explicit quantification domain instead of `adom(abox)`.
    pub fn with_adom(tbox: &'a TBox, abox: &'a ABox, adom: Vec<String>) -> Self {
        EcqEvaluator {
            tbox,
            shared: None,
            index: AboxIndex::new(abox),
            adom,
            rewritten: HashMap::new(),
            answers: HashMap::new(),
        }
    }

    /// Takes rewritings from the reasoner's shared cache.
    pub fn with_reasoner(reasoner: &'a Reasoner, abox: &'a ABox, adom: Vec<String>) -> Self {
        let mut eval = Self::with_adom(reasoner.tbox(), abox, adom);
        eval.shared = Some(reasoner);
        eval
    }

    pub fn adom(&self) -> &[String] {
        &self.adom
    }

    /// Certain answers of an embedded UCQ.
    pub fn ucq_answers(&mut self, q: &Ucq) -> &AnswerSet {
        if !self.answers.contains_key(q) {
            if let Some(r) = self.shared {
                let ans = r.rewrite(q).evaluate_indexed(&self.index);
                self.answers.insert(q.clone(), ans);
                return &self.answers[q];
            }
            let rew = self
                .rewritten
                .entry(q.clone())
                .or_insert_with(|| rewrite_ucq(q, self.tbox));
            let ans = rew.evaluate_indexed(&self.index);
            self.answers.insert(q.clone(), ans);
        }
        &self.answers[q]
    }

    /// Truth of `q` under a binding covering its free variables.
    pub fn holds(&mut self, q: &Ecq, env: &mut Substitution) -> bool {
        match q {
            Ecq::True => true,
            Ecq::False => false,
            Ecq::Ucq(u) => {
                let env_ref: &Substitution = env;
                self.ucq_answers(u).contains_binding(env_ref)
            }
            Ecq::Not(a) => !self.holds(a, env),
            Ecq::And(a, b) => self.holds(a, env) && self.holds(b, env),
            Ecq::Or(a, b) => self.holds(a, env) || self.holds(b, env),
            Ecq::Implies(a, b) => !self.holds(a, env) || self.holds(b, env),
            Ecq::Exists(v, body) | Ecq::Forall(v, body) => {
                let want = matches!(q, Ecq::Exists(..));
                let saved = env.remove(v);
                let mut result = !want;
                for d in self.adom.clone() {
                    env.insert(v.clone(), d);
                    if self.holds(body, env) == want {
                        result = want;
                        break;
                    }
                }
                env.remove(v);
                if let Some(s) = saved {
                    env.insert(v.clone(), s);
                }
                result
            }
        }
    }

    /// All answers of `q`: bindings of its free variables to the active
    /// domain under which it holds.
    pub fn answers(&mut self, q: &Ecq) -> AnswerSet {
        let vars: Vec<String> = q.free_vars().into_iter().collect();
        if let Ecq::Ucq(u) = q {
            // certain answers already range over the active domain
            return self.ucq_answers(u).clone();
        }
        let mut tuples = BTreeSet::new();
        let mut idx = vec![0usize; vars.len()];
        if !vars.is_empty() && self.adom.is_empty() {
            return AnswerSet { vars, tuples };
        }
        loop {
            let mut env: Substitution = vars
                .iter()
                .zip(&idx)
                .map(|(v, &i)| (v.clone(), self.adom[i].clone()))
                .collect();
            if self.holds(q, &mut env) {
                tuples.insert(idx.iter().map(|&i| self.adom[i].clone()).collect());
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return AnswerSet { vars, tuples };
                }
                idx[pos] += 1;
                if idx[pos] < self.adom.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Answers of an ECQ; existential variables range over `adom(abox)`.
pub fn answer_ecq(q: &Ecq, tbox: &TBox, abox: &ABox) -> AnswerSet {
    EcqEvaluator::new(tbox, abox).answers(q)
}

/// Truth of a closed ECQ, or of an open one under `binding`.
pub fn ecq_holds(q: &Ecq, tbox: &TBox, abox: &ABox, binding: &BTreeMap<String, String>) -> bool {
    let mut env = binding.clone();
    EcqEvaluator::new(tbox, abox).holds(q, &mut env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::syntax::{BasicConcept, Cq, TBoxAssertion};

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    fn tuples(a: &AnswerSet) -> BTreeSet<Vec<&str>> {
        a.tuples
            .iter()
            .map(|t| t.iter().map(String::as_str).collect())
            .collect()
    }

    fn assembler_qc() -> TBox {
        TBox::new([TBoxAssertion::ConceptIncl(
            BasicConcept::atomic("Assembler"),
            BasicConcept::atomic("QC"),
        )])
    }

    #[test]
    fn certain_answers_through_inclusion() {
        let abox: ABox = [Fact::concept("Assembler", "a")].into_iter().collect();
        let ans = certain_answers_ucq(&Ucq::atom("QC", vec![v("x")]), &assembler_qc(), &abox);
        assert_eq!(tuples(&ans), BTreeSet::from([vec!["a"]]));
    }

    #[test]
    fn boolean_query_without_match_is_false() {
        let abox: ABox = [Fact::concept("A", "a")].into_iter().collect();
        let q = Ucq::atom("B", vec![Term::constant("a")]);
        assert!(!certain_answers_ucq(&q, &TBox::default(), &abox).is_true());
        let q = Ucq::atom("A", vec![Term::constant("a")]);
        assert!(certain_answers_ucq(&q, &TBox::default(), &abox).is_true());
    }

    #[test]
    fn existential_projection() {
        let abox: ABox = [Fact::role("P", "a", "b")].into_iter().collect();
        let q = Ucq::new(vec![Cq::new(
            vec!["y".into()],
            vec![Atom::new("P", vec![v("x"), v("y")])],
        )])
        .unwrap();
        let ans = certain_answers_ucq(&q, &TBox::default(), &abox);
        assert_eq!(tuples(&ans), BTreeSet::from([vec!["a"]]));
    }

    #[test]
    fn ecq_negation_over_adom() {
        let abox: ABox = [
            Fact::concept("Worker", "a"),
            Fact::concept("Worker", "b"),
            Fact::concept("QC", "b"),
        ]
        .into_iter()
        .collect();
        let q = Ecq::and(
            Ecq::Ucq(Ucq::atom("Worker", vec![v("x")])),
            Ecq::not(Ecq::Ucq(Ucq::atom("QC", vec![v("x")]))),
        );
        let ans = answer_ecq(&q, &TBox::default(), &abox);
        assert_eq!(tuples(&ans), BTreeSet::from([vec!["a"]]));
    }

    #[test]
    fn ecq_closed_forms() {
        let abox: ABox = [Fact::concept("Assembler", "a")].into_iter().collect();
        let unsat = Ecq::not(Ecq::Ucq(Ucq::atom("Nobody", vec![v("x")])));
        let unsat = Ecq::forall("x", unsat);
        assert!(answer_ecq(&unsat, &TBox::default(), &abox).is_true());
        let q = Ecq::exists("x", Ecq::Ucq(Ucq::atom("QC", vec![v("x")])));
        assert!(answer_ecq(&q, &assembler_qc(), &abox).is_true());
        assert!(!answer_ecq(&q, &TBox::default(), &abox).is_true());
    }
}
