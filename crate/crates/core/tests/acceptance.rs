//! Acceptance criteria, one printed line each. Runs without the libtest
//! harness so the lines show up in plain `cargo test` output; exits nonzero
//! if any criterion fails.

use std::time::{Duration, Instant};

use vassreach::model::{Cg, Cgs, Connector, IntVec, Vass};
use vassreach::oracle::OracleBound;
use vassreach::search::SearchBudget;
use vassreach::selftest::{self, SuiteReport};

const SEED: u64 = 0;

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn suite_line(id: u32, name: &'static str, rep: &SuiteReport, took: Duration, limit: Option<Duration>) -> Line {
    let in_time = limit.is_none_or(|l| took <= l);
    let mut detail = format!(
        "cases={} skipped={} failures={} (tolerance 0) time={:.1}s",
        rep.cases,
        rep.skipped,
        rep.failures,
        took.as_secs_f64()
    );
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {}s)", l.as_secs()));
    }
    if let Some(f) = &rep.first_failure {
        detail.push_str(&format!(" first failure: {f}"));
    }
    Line {
        id,
        name,
        pass: rep.passed() && in_time,
        detail,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn loops(deltas: &[&[i64]]) -> Cg {
    let mut g = Vass::new(deltas[0].len()).unwrap();
    let p = g.add_state("p");
    for d in deltas {
        g.add_transition(p, p, IntVec::from(d.to_vec())).unwrap();
    }
    Cg::new(g, p, p).unwrap()
}

/// Normal sequences built by hand, with their boundary values.
fn hand_normal() -> Vec<(Cgs, Vec<i64>, Vec<i64>)> {
    let mut out = Vec::new();
    out.push((
        Cgs::new(
            vec![Cg::trivial(1, "p", 0), Cg::trivial(1, "q", 1)],
            vec![Connector {
                delta: IntVec::from([2]),
                label: 0,
            }],
        )
        .unwrap(),
        vec![1],
        vec![3],
    ));
    out.push((Cgs::single(loops(&[&[1], &[-1]])), vec![0], vec![0]));
    out.push((
        Cgs::single(loops(&[&[1, 1], &[-1, -1], &[1, 0], &[-1, 0]])),
        vec![0, 0],
        vec![3, 0],
    ));
    {
        let mut g = Vass::new(2).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        g.add_transition(p, q, IntVec::from([-2, 1])).unwrap();
        g.add_transition(q, p, IntVec::from([1, -2])).unwrap();
        g.add_transition(p, p, IntVec::from([1, 1])).unwrap();
        g.add_transition(p, p, IntVec::from([-1, -1])).unwrap();
        out.push((Cgs::single(Cg::new(g, p, p).unwrap()), vec![0, 0], vec![0, 0]));
    }
    {
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        g.add_transition(p, q, IntVec::from([1])).unwrap();
        g.add_transition(q, p, IntVec::from([0])).unwrap();
        out.push((Cgs::single(Cg::new(g, p, q).unwrap()), vec![0], vec![3]));
    }
    out.push((
        Cgs::new(
            vec![loops(&[&[1, 0], &[-1, 0]]), loops(&[&[0, 1], &[0, -1], &[1, 0], &[-1, 0]])],
            vec![Connector {
                delta: IntVec::from([-1, 1]),
                label: 9,
            }],
        )
        .unwrap(),
        vec![1, 0],
        vec![2, 2],
    ));
    out.push((
        Cgs::single(loops(&[&[1, 0, -1], &[-1, 1, 0], &[0, -1, 1], &[1, 1, 1], &[-1, -1, -1]])),
        vec![0, 0, 0],
        vec![1, 1, 1],
    ));
    out
}

fn main() {
    let mut lines = Vec::new();
    let bound = OracleBound::default();

    // criteria 1, 2, 7 and 8 share one run over the generated corpus
    let corpus = selftest::corpus(300, SEED);
    let (agree, took) = timed(|| selftest::oracle_agreement(&corpus, &SearchBudget::desk(), &bound, 50));
    let problem = agree
        .first_problem
        .as_deref()
        .map(|p| format!(" first problem: {p}"))
        .unwrap_or_default();
    lines.push(Line {
        id: 1,
        name: "oracle agreement",
        pass: agree.disagreements == 0 && agree.both_decided >= 60 && took <= Duration::from_secs(600),
        detail: format!(
            "instances={} decide-definitive={} oracle-definitive={} both={} (need >= 60) disagreements={} (tolerance 0) time={:.1}s (limit 600s){problem}",
            agree.instances,
            agree.decided,
            agree.oracle_decided,
            agree.both_decided,
            agree.disagreements,
            took.as_secs_f64()
        ),
    });
    lines.push(Line {
        id: 2,
        name: "never wrong",
        pass: agree.never_wrong_violations == 0 && agree.invalid_walks == 0,
        detail: format!(
            "reachable-vs-proven-unreachable={} invalid-walks={} (tolerance 0)",
            agree.never_wrong_violations, agree.invalid_walks
        ),
    });

    let (rep, t) = timed(|| selftest::hilbert_suite(200, SEED));
    lines.push(suite_line(3, "hilbert kernel", &rep, t, Some(Duration::from_secs(120))));
    let (rep, t) = timed(|| selftest::euler_suite(500, 200, SEED));
    lines.push(suite_line(4, "euler round-trip", &rep, t, None));
    let (rep, t) = timed(|| selftest::witness_system_suite(100, 20, SEED));
    lines.push(suite_line(5, "witness-system exactness", &rep, t, Some(Duration::from_secs(180))));
    let (rep, t) = timed(|| selftest::pump_suite(100, SEED));
    lines.push(suite_line(6, "pumpability exactness", &rep, t, None));

    lines.push(Line {
        id: 7,
        name: "dimension descent",
        pass: agree.descent_violations == 0,
        detail: format!(
            "decomposition-steps={} violations={} (tolerance 0) depth-limit-excess={}",
            agree.decomposition_steps, agree.descent_violations, agree.depth_violations
        ),
    });
    lines.push(Line {
        id: 8,
        name: "refinement soundness",
        pass: agree.refinement_violations == 0,
        detail: format!(
            "steps={} samples-per-step=50 violations={} (tolerance 0)",
            agree.refinement_steps, agree.refinement_violations
        ),
    });

    let (rep, t) = timed(|| {
        let hand = hand_normal();
        let mut rep = SuiteReport::default();
        for (k, (cgs, a, b)) in hand.iter().enumerate() {
            let (a, b) = (IntVec::from(a.clone()), IntVec::from(b.clone()));
            let cgs = cgs.clone().with_boundary(a.clone(), b.clone());
            rep.cases += 1;
            match selftest::synthesis_case(&cgs, &a, &b) {
                Some(Ok(())) => {}
                Some(Err(e)) => {
                    rep.failures += 1;
                    rep.first_failure.get_or_insert(format!("hand {k}: {e}"));
                }
                None => {
                    rep.failures += 1;
                    rep.first_failure.get_or_insert(format!("hand {k}: not normal"));
                }
            }
        }
        let gen = selftest::synthesis_suite(30 - hand.len(), SEED);
        rep.cases += gen.cases;
        rep.failures += gen.failures;
        if gen.cases < 30 - hand.len() {
            rep.failures += 1;
            rep.first_failure.get_or_insert("too few generated normal instances".into());
        }
        if rep.first_failure.is_none() {
            rep.first_failure = gen.first_failure;
        }
        rep
    });
    lines.push(suite_line(9, "normal synthesis", &rep, t, None));
    let (rep, t) = timed(|| selftest::geometry_suite(100, SEED));
    lines.push(suite_line(10, "geometry oracle", &rep, t, None));

    let mut failed = 0;
    for l in &lines {
        println!(
            "criterion {:>2} {:<26} {}  {}",
            l.id,
            l.name,
            if l.pass { "PASS" } else { "FAIL" },
            l.detail
        );
        failed += usize::from(!l.pass);
    }
    println!("acceptance: {} of {} criteria pass", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
