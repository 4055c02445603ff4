use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use girthforge::bounds::{
    entropy_lp_complexity, multipartite_cover_minmax, star_cover_minmax, stinson_upper, EntropyObjective,
};
use girthforge::certificate::{audit_certificate, certify_sum_bound, check_decomposition_identity, Certificate};
use girthforge::family::{
    build_gd, build_large_girth, build_pi_graph, build_pi_graph_with, guaranteed_n, LargeGirth, LargeGirthOptions,
    PiGraphOptions, SizePolicy,
};
use girthforge::graph::{check_homomorphism, check_regular_bipartite, girth, Girth, Graph};
use girthforge::rational::Rational;
use girthforge::scheme::{enumerate_joint, make_star_decomposition, measured_ratio, realize_scheme, verify_perfect};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli(dir: &Path, args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_girthforge"))
        .args(args)
        .current_dir(dir)
        .env_remove("GIRTHFORGE_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
    }
    Ok(String::from_utf8_lossy(&o.stdout).trim().to_string())
}

fn write_graph(dir: &Path, name: &str, g: &Graph) -> Result<(), String> {
    std::fs::write(dir.join(name), g.to_edge_list()).map_err(|e| e.to_string())
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took <= limit, format!("took {took:.1?}, limit {limit:?}"))?;
    Ok(format!("{detail} ({took:.1?})"))
}

fn entropy_exactness(dir: &Path) -> Outcome {
    let mut seen = Vec::new();
    for (name, g, want) in
        [("c6.txt", Graph::cycle(6), "3/2"), ("c8.txt", Graph::cycle(8), "3/2"), ("k4.txt", Graph::complete(4), "1")]
    {
        write_graph(dir, name, &g)?;
        let got =
            timed(Duration::from_secs(60), || cli(dir, &["bound", "entropy", "--objective", "minmax", "-i", name]))?;
        ensure(got.starts_with(&format!("{want} ")), format!("{name}: got {got}, want {want}"))?;
        seen.push(format!("{name}={got}"));
    }
    Ok(seen.join(", "))
}

fn sum_bound(dir: &Path) -> Outcome {
    write_graph(dir, "c6.txt", &Graph::cycle(6))?;
    let sum = timed(Duration::from_secs(60), || cli(dir, &["bound", "entropy", "--objective", "sum", "-i", "c6.txt"]))?;
    ensure(sum.starts_with("9 "), format!("sum {sum}"))?;
    let set = timed(Duration::from_secs(60), || cli(dir, &["bound", "entropy", "--set", "v2,v3", "-i", "c6.txt"]))?;
    ensure(set.starts_with("3 "), format!("set {set}"))?;
    Ok(format!("sum={sum}, f(v2v3)={set}"))
}

fn star_cover(dir: &Path) -> Outcome {
    write_graph(dir, "c6.txt", &Graph::cycle(6))?;
    let c6 = timed(Duration::from_secs(60), || cli(dir, &["bound", "star-cover", "-i", "c6.txt"]))?;
    ensure(c6.starts_with("3/2 "), format!("C_6 {c6}"))?;
    cli(dir, &["gen", "gd", "--parts", "6,5", "--seed", "1", "-o", "g3.txt"])?;
    let g3 = timed(Duration::from_secs(60), || cli(dir, &["bound", "star-cover", "-i", "g3.txt"]))?;
    ensure(g3.starts_with("2 "), format!("G_3 {g3}"))?;
    Ok(format!("C_6={c6}, G_3(6,5)={g3}"))
}

fn certificate_scaling(dir: &Path) -> Outcome {
    let start = Instant::now();
    let mut seen = Vec::new();
    for (parts, n, total) in [("6,5", 30, "60"), ("6,5,5", 150, "375"), ("6,5,5,5", 750, "2250")] {
        let file = format!("g{n}.txt");
        let cert = format!("cert{n}.json");
        cli(dir, &["gen", "gd", "--parts", parts, "--seed", "1", "-o", &file])?;
        let summary: serde_json::Value =
            serde_json::from_str(&cli(dir, &["certify", "-i", &file, "-o", &cert])?).map_err(|e| e.to_string())?;
        ensure(summary["total"] == total, format!("G({parts}) total {}", summary["total"]))?;
        let audit: serde_json::Value =
            serde_json::from_str(&cli(dir, &["audit", "-i", &file, "-c", &cert])?).map_err(|e| e.to_string())?;
        ensure(audit["verified"] == true, format!("G({parts}) audit {audit}"))?;
        seen.push(format!("{n}v total {total}"));
    }
    let took = start.elapsed();
    ensure(took <= Duration::from_secs(300), format!("took {took:?}"))?;

    // fault injection on the 30-vertex member
    let g = build_gd(&[6, 5], 1).map_err(|e| e.to_string())?;
    let cert = certify_sum_bound(&g).map_err(|e| e.to_string())?;
    audit_certificate(&g.graph, &cert, 4, 9).map_err(|e| e.to_string())?;
    let (b, a) = g.factors[0].pairs[0];
    let cut = g.graph.without_edges(&[(a.min(b), a.max(b))]);
    ensure(audit_certificate(&cut, &cert, 4, 9).is_err(), "audit accepted a graph missing a junction edge")?;
    let mut inflated: Certificate = cert.clone();
    let t = &mut inflated.lemmas[0].terms[0];
    t.bound = &t.bound + &Rational::one();
    ensure(audit_certificate(&g.graph, &inflated, 4, 9).is_err(), "audit accepted an inflated bound")?;
    Ok(format!("{} ({took:.1?}); both faults rejected", seen.join(", ")))
}

fn decomposition_identity() -> Outcome {
    for n in [5, 6, 8, 12] {
        check_decomposition_identity(n, 1000, n as u64).map_err(|e| format!("n={n}: {e}"))?;
    }
    Ok("n = 5, 6, 8, 12 with 1000 trials each".into())
}

fn large_girth() -> Outcome {
    let p = build_pi_graph(6, 4096, 7, 10).map_err(|e| e.to_string())?;
    p.validate().map_err(|e| e.to_string())?;
    check_regular_bipartite(&p.graph, 3).map_err(|e| e.to_string())?;
    let measured = girth(&p.graph);
    ensure(measured == p.girth && measured.exceeds(6), format!("π-graph girth {measured}"))?;

    let built =
        build_large_girth(&LargeGirthOptions::new(3, 6, SizePolicy::Practical(7))).map_err(|e| e.to_string())?;
    let LargeGirth::Built { graph: g, girth: gi, .. } = built else {
        return Err("practical policy returned sizes".into());
    };
    g.validate().map_err(|e| e.to_string())?;
    let measured3 = girth(&g.graph);
    ensure(measured3 == gi && measured3 >= Girth::Finite(6), format!("G_3 girth {measured3}"))?;
    let base = g.copy(0).map_err(|e| e.to_string())?;
    let pi_edges: Vec<_> = g.factors[0].pairs.iter().map(|&(b, a)| (a % base.n(), b % base.n())).collect();
    let target = base.graph.with_edges(pi_edges).map_err(|e| e.to_string())?;
    ensure(check_homomorphism(&g.graph, &target, &g.projection()).map_err(|e| e.to_string())?, "projection")?;

    let two = BigUint::from(2u8);
    ensure(guaranteed_n(6) == two.pow(76) && guaranteed_n(1) == two.pow(16), "guaranteed_n")?;
    Ok(format!("π-graph 8192v girth {measured}; G_3 {}v girth {measured3}, projection ok; N(6) = 2^76", g.n()))
}

fn surgery_path() -> Outcome {
    let (g, n) = (5, 60);
    for seed in 0..200 {
        let opts = PiGraphOptions { max_interval: Some(12), ..PiGraphOptions::new(g, n, seed, 1) };
        let Ok(p) = build_pi_graph_with(&opts) else { continue };
        if p.leftovers == 0 {
            continue;
        }
        p.validate().map_err(|e| e.to_string())?;
        check_regular_bipartite(&p.graph, 3).map_err(|e| e.to_string())?;
        let measured = girth(&p.graph);
        ensure(measured == p.girth, "reported girth differs from measured")?;
        ensure(measured >= Girth::Finite(g.div_ceil(3)), format!("girth {measured} below g/3"))?;
        return Ok(format!("seed {seed}: {} leftovers repaired, girth {measured}", p.leftovers));
    }
    Err("no seed forced leftovers".into())
}

fn scheme_perfectness() -> Outcome {
    let start = Instant::now();
    let g = Graph::cycle(6);
    let s = realize_scheme(&make_star_decomposition(&g).map_err(|e| e.to_string())?, 7).map_err(|e| e.to_string())?;
    let jd = enumerate_joint(&s).map_err(|e| e.to_string())?;
    ensure(jd.states() == 7u64.pow(8), format!("{} states", jd.states()))?;
    let report = verify_perfect(&jd, 1).map_err(|e| e.to_string())?;
    ensure(report.perfect, "not perfect")?;
    let ratio = measured_ratio(&report).map_err(|e| e.to_string())?;
    let lp = entropy_lp_complexity(&g, EntropyObjective::MinMax).map_err(|e| e.to_string())?;
    ensure(ratio == Rational::new(3, 2) && ratio == lp.value, format!("ratio {ratio}, LP {}", lp.value))?;
    let faulty = enumerate_joint(&s.with_shared_randomness(0, 3)).map_err(|e| e.to_string())?;
    let fr = verify_perfect(&faulty, 1).map_err(|e| e.to_string())?;
    ensure(!fr.perfect && !fr.independence_failures.is_empty(), "shared randomness not detected")?;
    let took = start.elapsed();
    ensure(took <= Duration::from_secs(600), format!("took {took:?}"))?;
    Ok(format!(
        "7^8 states, perfect, ratio {ratio} = LP {}; fault caught on {:?} ({took:.1?})",
        lp.value, fr.independence_failures[0]
    ))
}

fn ordering_invariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        let n = rng.gen_range(2..=9);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(0.4)).collect();
        let g = Graph::new(n, edges).map_err(|e| e.to_string())?;
        let lp = entropy_lp_complexity(&g, EntropyObjective::MinMax).map_err(|e| e.to_string())?.value;
        let multi = multipartite_cover_minmax(&g).map_err(|e| e.to_string())?.max_load;
        let star = star_cover_minmax(&g).map_err(|e| e.to_string())?.max_load;
        let stinson = stinson_upper(g.max_degree());
        ensure(
            lp <= multi && multi <= star && star <= stinson,
            format!("graph {i} ({n}v): {lp} <= {multi} <= {star} <= {stinson} fails"),
        )?;
    }
    Ok("20 graphs on at most 9 vertices".into())
}

fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        ("1 entropy LP exactness", Box::new(|| entropy_exactness(d))),
        ("2 sum bound", Box::new(|| sum_bound(d))),
        ("3 star-cover tightness", Box::new(|| star_cover(d))),
        ("4 certificate scaling", Box::new(|| certificate_scaling(d))),
        ("5 decomposition identity", Box::new(decomposition_identity)),
        ("6 large-girth construction", Box::new(large_girth)),
        ("7 surgery path", Box::new(surgery_path)),
        ("8 scheme perfectness", Box::new(scheme_perfectness)),
        ("9 ordering invariant", Box::new(ordering_invariant)),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => report(&format!("PASS criterion {name}: {detail}")),
            Err(why) => {
                report(&format!("FAIL criterion {name}: {why}"));
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
