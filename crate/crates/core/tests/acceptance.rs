//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use common::*;
use ultragreedoid::field::smallest_available_order;
use ultragreedoid::geg::{geg_enumerate, plucker_check, vandermonde_monic_check};
use ultragreedoid::group_algebra::GroupAlgebraElement;
use ultragreedoid::label::labels;
use ultragreedoid::newick::{parse_newick, triple_from_tree, NewickError};
use ultragreedoid::represent::{build_representation, converse_search};
use ultragreedoid::ring::{Polynomial, Ring};
use ultragreedoid::setsys::{
    bhargava_bruteforce, check_all_levels, check_greedoid_axioms, greedy_schedule, max_perimeters,
};
use ultragreedoid::ultra::UltraTriple;
use ultragreedoid::{fixtures, SetSystem, VectorFamily};

type Outcome = Result<String, String>;

/// A check and its wall-clock limit, if any.
type Criterion = (fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sets(ground: &[i64], members: &[&[i64]]) -> SetSystem {
    SetSystem::new(labels(ground), members.iter().map(|s| labels(s)).collect()).unwrap()
}

/// Fixed-seed random triples shared by several criteria.
fn random_corpus() -> Vec<UltraTriple> {
    let mut r = rng(0x5eed);
    (0..200).map(|_| random_triple(&mut r, 8)).collect()
}

fn triple_corpus() -> Vec<UltraTriple> {
    let mut all = vec![fixtures::bhargava0(), fixtures::bhargava1()];
    for text in ["((A:1,B:1):1,C:2);", "(A,B);", "(A:1,B:1,C:1);", "A;"] {
        all.push(triple_from_tree(&parse_newick(text).unwrap()).unwrap());
    }
    all.extend(random_corpus());
    let mut r = rng(0xc0);
    all.extend((0..50).map(|_| random_triple(&mut r, 12)));
    all
}

fn family_corpus() -> Vec<VectorFamily> {
    let mut r = rng(0xfa);
    let mut all: Vec<VectorFamily> = (0..150)
        .map(|x| random_family(&mut r, &gf([2, 3, 5][x % 3]), 7))
        .collect();
    let f7 = gf(7);
    all.push(VectorFamily::new(f7.clone(), labels(&[1, 2, 3, 4, 5]), fixtures::matrix2(&f7)).unwrap());
    all.push(explicit_family());
    all
}

fn explicit_family() -> VectorFamily {
    VectorFamily::from_int_rows(
        &gf(2),
        labels(&[1, 2, 3]),
        &[vec![0, 0, 1], vec![0, 1, 1], vec![1, 1, 1]],
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let t = fixtures::bhargava1();
    let expected = sets(
        &[0, 1, 2, 3, 4],
        &[
            &[],
            &[4],
            &[0, 4],
            &[1, 4],
            &[2, 4],
            &[3, 4],
            &[0, 1, 4],
            &[0, 3, 4],
            &[1, 3, 4],
            &[0, 2, 4],
            &[1, 2, 4],
            &[0, 1, 2, 4],
            &[0, 1, 3, 4],
            &[0, 1, 2, 3, 4],
        ],
    );
    let g = bhargava_bruteforce(&t).map_err(|e| e.to_string())?;
    ensure(g == expected, || format!("greedoid {:?}", g.sets()))?;
    ensure(g.len() == 14, || format!("{} sets", g.len()))?;
    ensure(t.mcs() == 3, || format!("mcs {}", t.mcs()))?;
    let per = t.perimeter(&labels(&[0, 4])).map_err(|e| e.to_string())?;
    ensure(per == 8, || format!("PER{{0,4}} = {per}"))?;
    let max3 = max_perimeters(&t).map_err(|e| e.to_string())?[3];
    ensure(max3 == 15, || format!("max 3-subset perimeter {max3}"))?;
    Ok("14 sets, mcs 3, PER{0,4} = 8, max PER over 3-subsets = 15".into())
}

fn criterion_2() -> Outcome {
    let expected = sets(
        &[1, 2, 3, 4, 5],
        &[
            &[],
            &[2],
            &[3],
            &[5],
            &[1, 2],
            &[1, 3],
            &[1, 5],
            &[2, 3],
            &[2, 5],
            &[1, 2, 3],
            &[1, 2, 5],
            &[1, 2, 3, 5],
        ],
    );
    let rows: Vec<Vec<i64>> = vec![
        vec![0, 1, 1, 0, 1],
        vec![1, 1, 0, 0, 0],
        vec![0, 2, 1, 0, 1],
        vec![1, 0, 1, 0, 0],
        vec![0, 0, 0, 0, 0],
        vec![1, 2, 0, 2, 1],
    ];
    let over_q = rational_geg(&labels(&[1, 2, 3, 4, 5]), &rows);
    ensure(over_q == expected, || {
        "rational oracle disagrees with the listed sets".into()
    })?;
    let f = gf(7);
    let fam = VectorFamily::new(f.clone(), labels(&[1, 2, 3, 4, 5]), fixtures::matrix2(&f)).unwrap();
    let oracle = geg_oracle(&fam);
    ensure(oracle == expected, || "GF(7) determinant oracle disagrees".into())?;
    let g = geg_enumerate(&fam).map_err(|e| e.to_string())?;
    ensure(g == expected, || format!("geg_enumerate gave {:?}", g.sets()))?;
    Ok("12 sets over GF(7), equal to the rational and determinant oracles".into())
}

fn criterion_3() -> Outcome {
    let mut checks = 0;
    for (x, t) in random_corpus().iter().enumerate() {
        let q1 = smallest_available_order(t.mcs() as u64);
        let q2 = smallest_available_order(q1 + 1);
        let mut qs = vec![q1, q2, 7, 9];
        qs.sort_unstable();
        qs.dedup();
        let oracle = bhargava_bruteforce(t).map_err(|e| e.to_string())?;
        for q in qs.into_iter().filter(|&q| q as usize >= t.mcs()) {
            let rep = build_representation(t, &gf(q)).map_err(|e| format!("triple {x}, GF({q}): {e}"))?;
            let g = geg_enumerate(&rep.family).map_err(|e| e.to_string())?;
            ensure(g == oracle, || format!("triple {x}, GF({q}): greedoids differ"))?;
            checks += 1;
        }
    }
    Ok(format!("200 triples, {checks} (triple, field) pairs"))
}

fn criterion_4() -> Outcome {
    let corpus = triple_corpus();
    let mut checks = 0;
    for (x, t) in corpus.iter().enumerate() {
        let s = greedy_schedule(t);
        let mut prefix = 0;
        for k in 0..=t.len() {
            let best = max_perimeter_oracle(t, k);
            ensure(prefix == best, || {
                format!("triple {x}, k = {k}: prefix {prefix}, max {best}")
            })?;
            checks += 1;
            if k < t.len() {
                prefix += s.rho[k];
            }
        }
    }
    Ok(format!("{} triples, {checks} cardinalities", corpus.len()))
}

fn criterion_5() -> Outcome {
    let f = gf(2);
    let ground = labels(&[1, 2, 3]);
    let all = subsets(3)
        .map(|s| s.iter().map(|&i| ground[i].clone()).collect())
        .collect();
    let power_set = SetSystem::new(ground, all).unwrap();
    let constant = UltraTriple::from_fn(labels(&[1, 2, 3]), |_| 0, |_, _| 1).unwrap();
    ensure(bhargava_bruteforce(&constant).unwrap() == power_set, || {
        "constant triple is not the power set".into()
    })?;
    let none = converse_search(&power_set, &f).map_err(|e| e.to_string())?;
    ensure(none.is_none(), || "found a GF(2) family for the power set".into())?;
    let target = bhargava_bruteforce(&fixtures::bhargava0()).unwrap();
    let found = converse_search(&target, &f)
        .map_err(|e| e.to_string())?
        .ok_or("no GF(2) family for bhargava0")?;
    ensure(geg_enumerate(&found).unwrap() == target, || {
        "search result has the wrong greedoid".into()
    })?;
    ensure(geg_enumerate(&explicit_family()).unwrap() == target, || {
        "explicit family has the wrong greedoid".into()
    })?;
    Ok("power set absent over GF(2) (512 families); bhargava0 found; explicit family matches".into())
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for (x, fam) in family_corpus().iter().enumerate() {
        let g = geg_enumerate(fam).map_err(|e| e.to_string())?;
        let report = check_greedoid_axioms(&g);
        ensure(report.is_strong_greedoid(), || format!("family {x}: {report:?}"))?;
        checked += 1;
    }
    let families = checked;
    for (x, t) in triple_corpus().iter().enumerate() {
        let report = check_greedoid_axioms(&bhargava_bruteforce(t).unwrap());
        ensure(report.is_strong_greedoid(), || format!("triple {x}: {report:?}"))?;
        checked += 1;
    }
    Ok(format!(
        "{families} Gaussian elimination greedoids, {} Bhargava greedoids",
        checked - families
    ))
}

fn criterion_7() -> Outcome {
    let mut greedoids: Vec<SetSystem> = family_corpus().iter().map(|f| geg_enumerate(f).unwrap()).collect();
    greedoids.extend(triple_corpus().iter().map(|t| bhargava_bruteforce(t).unwrap()));
    let mut levels = 0;
    for (x, g) in greedoids.iter().enumerate() {
        check_all_levels(g).map_err(|(k, v)| format!("greedoid {x}, level {k}: {v:?}"))?;
        levels += (0..=g.ground().len()).filter(|&k| !g.level(k).is_empty()).count();
    }
    Ok(format!("{} greedoids, {levels} nonempty levels", greedoids.len()))
}

fn criterion_8() -> Outcome {
    let mut r = rng(0x8);
    for case in 0..500 {
        let f = gf(if case % 2 == 0 { 5 } else { 11 });
        let n = r.gen_range(1..=5);
        let x = random_matrix(&mut r, &f, n, n - 1);
        let y = random_matrix(&mut r, &f, n, n);
        let i = r.gen_range(0..n);
        ensure(plucker_check(&x, &y, i, &f.one()).unwrap(), || {
            format!("Plucker case {case}")
        })?;
    }
    fn monic<R: Ring>(roots: &[R], noise: Vec<R>, one: &R) -> Polynomial<R> {
        let mut c = Polynomial::from_roots(roots, one).coeffs().to_vec();
        for (k, v) in noise.into_iter().enumerate() {
            c[k] = c[k].add_ref(&v);
        }
        Polynomial::new(c)
    }
    for case in 0..500 {
        let ok = if case % 2 == 0 {
            let f = gf([2, 5, 7, 8][case / 2 % 4]);
            let k = r.gen_range(0..=6);
            let pts: Vec<_> = (0..k).map(|_| random_element(&mut r, &f)).collect();
            let fs: Vec<_> = (0..k)
                .map(|j| {
                    let noise = (0..j).map(|_| random_element(&mut r, &f)).collect();
                    monic(&pts[..j], noise, &f.one())
                })
                .collect();
            let us: Vec<_> = (0..k).map(|_| random_element(&mut r, &f)).collect();
            vandermonde_monic_check(&fs, &us, &f.one()).unwrap()
        } else {
            let f = gf([2, 3, 4][case / 2 % 3]);
            let one = GroupAlgebraElement::one(&f);
            let k = r.gen_range(0..=4);
            let pts: Vec<_> = (0..k).map(|_| random_ga(&mut r, &f, -2, 3, 3)).collect();
            let fs: Vec<_> = (0..k)
                .map(|j| {
                    let noise = (0..j).map(|_| random_ga(&mut r, &f, -2, 3, 2)).collect();
                    monic(&pts[..j], noise, &one)
                })
                .collect();
            let us: Vec<_> = (0..k).map(|_| random_ga(&mut r, &f, -2, 3, 3)).collect();
            vandermonde_monic_check(&fs, &us, &one).unwrap()
        };
        ensure(ok, || format!("Vandermonde case {case}"))?;
    }
    Ok("500 Plucker cases over GF(5)/GF(11); 500 Vandermonde cases, 250 in the group algebra".into())
}

fn criterion_9() -> Outcome {
    let mut r = rng(0x9);
    let mut assertions = 0usize;
    let mut check = |cond: bool, what: &str| -> Result<(), String> {
        assertions += 1;
        ensure(cond, || what.to_string())
    };
    for _ in 0..600 {
        let f = gf([2, 3, 4, 5, 7, 8, 9, 11][r.gen_range(0..8)]);
        let a = random_ga(&mut r, &f, -6, 6, 4);
        let b = random_ga(&mut r, &f, -6, 6, 4);
        if a.is_zero() || b.is_zero() {
            check((&a * &b).is_zero(), "product with zero")?;
            continue;
        }
        let (oa, ob) = (a.ord().unwrap(), b.ord().unwrap());
        check(a.in_lplus() == (oa >= 0), "L+ iff ord >= 0")?;
        check((-&a).ord().unwrap() == oa, "ord(-a) = ord a")?;
        let ab = &a * &b;
        check(!ab.is_zero(), "no zero divisors")?;
        check(ab.ord().unwrap() == oa + ob, "ord(ab) = ord a + ord b")?;
        let s = &a + &b;
        check(s.is_zero() || s.ord().unwrap() >= oa.min(ob), "ord(a+b) >= min")?;
        let c = random_ga(&mut r, &f, -3, 3, 3);
        if !c.is_zero() {
            check(
                (&ab * &c).ord().unwrap() == oa + ob + c.ord().unwrap(),
                "ord of a triple product",
            )?;
        }
        let (pa, pb) = (a.shift(-oa.min(0)).unwrap(), b.shift(-ob.min(0)).unwrap());
        check(
            (&pa + &pb).pi().unwrap() == &pa.pi().unwrap() + &pb.pi().unwrap(),
            "pi additive",
        )?;
        check(
            (&pa * &pb).pi().unwrap() == &pa.pi().unwrap() * &pb.pi().unwrap(),
            "pi multiplicative",
        )?;
        check(
            !pa.pi().unwrap().is_zero() == (pa.ord().unwrap() == 0),
            "pi(a) != 0 iff ord a = 0",
        )?;
    }
    check(
        GroupAlgebraElement::one(&gf(3)).pi().unwrap() == gf(3).one(),
        "pi(1) = 1",
    )?;
    ensure(assertions >= 2000, || format!("only {assertions} assertions"))?;

    let corpus = random_corpus();
    let mut subsets_checked = 0;
    for t in corpus.iter().filter(|t| !t.is_empty()) {
        if subsets_checked == 100 {
            break;
        }
        let q = smallest_available_order(t.mcs() as u64).max(3);
        let rep = build_representation(t, &gf(q)).map_err(|e| e.to_string())?;
        let k = r.gen_range(1..=t.len().min(5));
        let mut u = random_sample(&mut r, t.len(), k);
        u.shuffle(&mut r);
        let ordered: Vec<_> = u.iter().map(|&i| t.label(i).clone()).collect();
        let d = rep.lifted_minor_det(&ordered).map_err(|e| e.to_string())?;
        let rho: i64 = rep.schedule.rho[..k].iter().sum();
        let per = perimeter_oracle(t, &ordered);
        ensure(!d.is_zero() && d.ord().unwrap() == rho - per, || {
            format!("ord identity fails on {ordered:?}")
        })?;
        subsets_checked += 1;
    }
    ensure(subsets_checked == 100, || format!("only {subsets_checked} subsets"))?;
    Ok(format!(
        "{assertions} valuation assertions; ord identity on 100 embedded subsets"
    ))
}

fn criterion_10() -> Outcome {
    let mut r = rng(0x10);
    let mut instances = 0;
    while instances < 100 {
        // identity on the weighted triple, closure on its constant-weight version
        let weighted = random_triple(&mut r, 8);
        let t = weighted.with_constant_weight(r.gen_range(-5..=5));
        if t.len() < 2 {
            continue;
        }
        let pair = random_sample(&mut r, t.len(), 2);
        let beta = t.dist_idx(pair[0], pair[1]);
        let mut clique = pair;
        for e in 0..t.len() {
            if !clique.contains(&e) && clique.iter().all(|&c| t.dist_idx(c, e) == beta) {
                clique.push(e);
            }
        }
        let ball = t.indices(&t.closed_ball(beta, t.label(clique[0])).unwrap()).unwrap();
        let outside: Vec<usize> = (0..t.len()).filter(|e| !ball.contains(e)).collect();
        let per = |s: &[usize]| weighted.perimeter_idx(s).unwrap();
        for _ in 0..5 {
            let n: Vec<usize> = outside.iter().copied().filter(|_| r.gen_bool(0.5)).collect();
            let k = r.gen_range(0..=ball.len());
            let p: Vec<usize> = random_sample(&mut r, ball.len(), k)
                .into_iter()
                .map(|i| ball[i])
                .collect();
            let q: Vec<usize> = random_sample(&mut r, ball.len(), k)
                .into_iter()
                .map(|i| ball[i])
                .collect();
            let lhs = per(&[n.clone(), q.clone()].concat()) - per(&[n.clone(), p.clone()].concat());
            ensure(lhs == per(&q) - per(&p), || {
                format!("instance {instances}: identity fails")
            })?;
        }

        let g = bhargava_bruteforce(&t).unwrap();
        for member in g.sets() {
            let idx = t.indices(member).unwrap();
            let (p, n): (Vec<usize>, Vec<usize>) = idx.iter().partition(|e| ball.contains(e));
            if p.len() > clique.len() {
                continue;
            }
            for _ in 0..3 {
                let q: Vec<usize> = random_sample(&mut r, clique.len(), p.len())
                    .into_iter()
                    .map(|i| clique[i])
                    .collect();
                let swapped = t.labels_of(&[n.clone(), q].concat());
                ensure(g.contains(&swapped), || {
                    format!("instance {instances}: {member:?} -> {swapped:?}")
                })?;
            }
        }
        instances += 1;
    }
    Ok("100 instances: perimeter identity and clique-swap closure".into())
}

fn criterion_11() -> Outcome {
    let parse = |s: &str| parse_newick(s).map_err(|e| format!("{s}: {e}"));
    let d = |t: &UltraTriple, a: &str, b: &str| t.distance(&a.into(), &b.into()).unwrap();

    let clock = parse("((A:1,B:1):1,C:2);")?;
    ensure(clock.leaf_names() == ["A", "B", "C"], || "clock tree leaves".into())?;
    let t = triple_from_tree(&clock).map_err(|e| e.to_string())?;
    ensure((d(&t, "A", "B"), d(&t, "A", "C"), d(&t, "B", "C")) == (1, 2, 2), || {
        "clock tree distances".into()
    })?;
    ensure(t.weights().iter().all(|&w| w == 0), || "nonzero weight".into())?;

    let pair = parse("(A,B);")?;
    let t = triple_from_tree(&pair).map_err(|e| e.to_string())?;
    ensure(t.len() == 2 && d(&t, "A", "B") == 1, || "(A,B) distances".into())?;

    let star = triple_from_tree(&parse("(A:1,B:1,C:1);")?).map_err(|e| e.to_string())?;
    ensure(star.distance_values().into_iter().eq([1]) && star.mcs() == 3, || {
        "star tree".into()
    })?;
    let single = triple_from_tree(&parse("A;")?).map_err(|e| e.to_string())?;
    ensure(single.len() == 1, || "single leaf".into())?;

    let skewed = parse("((A:1,B:2):1,C:2);")?;
    match triple_from_tree(&skewed) {
        Err(NewickError::ClockViolation { a, b, depth_a, depth_b })
            if (a.as_str(), b.as_str(), depth_a.as_str(), depth_b.as_str()) == ("A", "B", "2", "3") => {}
        other => return Err(format!("expected clock violation at (A, B), got {other:?}")),
    }
    Ok("clock, pair, star and single-leaf trees; violation witness (A, B) at depths 2 and 3".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (criterion_1, Some(Duration::from_secs(1))),
        (criterion_2, Some(Duration::from_secs(1))),
        (criterion_3, Some(Duration::from_secs(60))),
        (criterion_4, None),
        (criterion_5, Some(Duration::from_secs(5))),
        (criterion_6, None),
        (criterion_7, None),
        (criterion_8, None),
        (criterion_9, None),
        (criterion_10, None),
        (criterion_11, None),
    ];
    let mut failed = 0;
    for (x, (run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(msg), Some(limit)) if elapsed > *limit => {
                Err(format!("{msg}, but took {elapsed:.2?} (limit {limit:?})"))
            }
            (r, _) => r,
        };
        let limit_note = limit.map_or(String::new(), |l| format!(", limit {l:?}"));
        match result {
            Ok(msg) => println!("criterion {}: PASS ({msg}; {elapsed:.2?}{limit_note})", x + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL ({msg}; {elapsed:.2?}{limit_note})", x + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
