//! Acceptance criteria, one PASS/FAIL line each. Every comparison is exact.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;

use common::{int, r};
use transit_games::factory::{self, PermScheme, ValueRange};
use transit_games::sequential::{spe_oracle, spe_outcomes, zermelo_outcome, SequentialAnalysis};
use transit_games::simultaneous::{
    enumerate_nash, improving_deviation, is_nash_equilibrium, optimal_social, NashOptions,
    SimultaneousAnalysis,
};
use transit_games::{Budget, Instance, MoveOrder, Outcome, Rational, SocialFn};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn budget() -> Budget {
    Budget::default()
}

fn identity(inst: &Instance) -> MoveOrder {
    MoveOrder::identity(inst.n())
}

fn seq(inst: &Instance) -> SequentialAnalysis<Rational> {
    SequentialAnalysis::run(inst, &identity(inst), &budget()).unwrap()
}

fn sim(inst: &Instance) -> SimultaneousAnalysis<Rational> {
    SimultaneousAnalysis::run(inst, &budget(), NashOptions::default()).unwrap()
}

fn spe_buses(inst: &Instance, order: &MoveOrder) -> BTreeSet<Vec<usize>> {
    spe_outcomes(inst, order, &budget())
        .unwrap()
        .outcomes()
        .map(|o| o.buses().to_vec())
        .collect()
}

/// Metric instances used by criteria 8 and 9: n in 1..=5, m in 2..=3.
fn random_metric_instances() -> Vec<Instance> {
    (0..200u64)
        .map(|seed| {
            let n = 1 + (seed % 5) as usize;
            let m = 2 + ((seed / 5) % 2) as usize;
            factory::random_metric(n, m, seed, ValueRange::default()).unwrap()
        })
        .collect()
}

fn random_small_instances() -> Vec<Instance> {
    (0..100u64)
        .map(|seed| factory::random_instance(3, 2, 1000 + seed, ValueRange::default()).unwrap())
        .collect()
}

fn criterion_1() -> Check {
    let inst: Instance = factory::example1();
    let sigma = Outcome::one_based(&[1, 1, 1, 2, 1]);
    let c = inst.cost_vector(&sigma).unwrap().costs;
    let want = [14, 8, 5, 3, 3].map(int).to_vec();
    ensure!(c == want, "cost vector {c:?}");
    ensure!(
        common::costs(&inst, sigma.buses()) == want,
        "naive walk disagrees"
    );
    let dev = improving_deviation(&inst, &sigma).unwrap();
    ensure!(
        !is_nash_equilibrium(&inst, &sigma).unwrap(),
        "sigma reported as NE"
    );
    let dev = dev.ok_or("no deviation found")?;
    ensure!(dev.player == 0, "deviating player {}", dev.player + 1);
    let sigma2 = Outcome::one_based(&[2, 1, 1, 2, 1]);
    ensure!(
        is_nash_equilibrium(&inst, &sigma2).unwrap(),
        "sigma' is not an NE"
    );
    ensure!(
        common::is_nash(&inst, sigma2.buses()),
        "naive NE check disagrees"
    );
    let c1 = inst.player_cost(&sigma2, 0).unwrap();
    ensure!(c1 == int(4), "c_1(sigma') = {c1}");
    Ok("costs (14,8,5,3,3); player 1 deviates; (2,1,1,2,1) is NE with c_1 = 4".into())
}

fn criterion_2() -> Check {
    let inst: Instance = factory::example2();
    let order = identity(&inst);
    let a = seq(&inst);
    let target = Outcome::one_based(&[1, 1, 2, 1]);
    let member = a
        .spe
        .get(&target)
        .ok_or("(1,1,2,1) is not an SPE outcome")?;
    ensure!(
        member.costs.costs == [5, 4, 2, 1].map(int).to_vec(),
        "costs {}",
        member.costs
    );
    let opt = optimal_social(&inst, SocialFn::E, &budget()).unwrap();
    ensure!(opt.value == int(3), "optimal E = {}", opt.value);
    ensure!(
        common::optimum(&inst, SocialFn::E) == int(3),
        "naive optimum disagrees"
    );
    let spoa = a.spoa(SocialFn::E).unwrap().ratio;
    ensure!(spoa >= r(5, 3), "spoa(E) = {spoa} < 5/3");

    let oracle = spe_oracle(&inst, &order, &budget()).unwrap();
    let worst = oracle
        .outcomes
        .values(SocialFn::E)
        .map(|(_, v)| v)
        .max()
        .ok_or("oracle found no SPE")?;
    ensure!(
        spoa == worst / opt.value,
        "spoa {spoa} vs oracle {}",
        worst / opt.value
    );
    let naive = common::spe_set(&inst, &order);
    ensure!(
        naive == spe_buses(&inst, &order),
        "naive profile search disagrees"
    );
    let naive_worst = naive
        .iter()
        .map(|s| common::social(&inst, s, SocialFn::E))
        .max()
        .unwrap();
    ensure!(
        spoa == naive_worst / int(3),
        "naive spoa {}",
        naive_worst / int(3)
    );
    let spos = a.spos(SocialFn::E).unwrap().ratio;
    Ok(format!(
        "{} SPE outcomes; spoa(E) = {spoa} (oracle agrees), spos(E) = {spos}",
        a.spe.len()
    ))
}

fn criterion_3() -> Check {
    for x in [10, 100, 1000] {
        let inst: Instance = factory::nonmetric_triangle(int(x)).unwrap();
        ensure!(inst.check_metric().is_err(), "X={x}: reported metric");
        let a = seq(&inst);
        for m in &a.spe.members {
            ensure!(
                m.costs.costs == vec![int(x), int(0), int(0)],
                "X={x}: SPE outcome {} has costs {}",
                m.outcome,
                m.costs
            );
        }
        for f in [SocialFn::U, SocialFn::E, SocialFn::D] {
            let spos = a.spos(f).unwrap().ratio;
            ensure!(spos == int(x), "X={x}: spos({f}) = {spos}");
            let naive = common::spe_set(&inst, &identity(&inst))
                .iter()
                .map(|s| common::social(&inst, s, f))
                .min()
                .unwrap()
                / common::optimum(&inst, f);
            ensure!(naive == int(x), "X={x}: naive spos({f}) = {naive}");
        }
        let nash = enumerate_nash(&inst, &budget(), NashOptions::default()).unwrap();
        ensure!(
            nash.values.iter().any(|v| v.u == int(x)),
            "X={x}: no NE with U = X"
        );
    }
    Ok("SPE costs (X,0,0), spos = X for U,E,D, NE with U = X, X in {10,100,1000}".into())
}

fn criterion_4() -> Check {
    for n in 2..=4usize {
        let eps = r(1, 8);
        let inst: Instance = factory::epsilon_star(n, n, eps, PermScheme::Reverse).unwrap();
        let a = seq(&inst);
        for m in &a.spe.members {
            let distinct: BTreeSet<_> = m.outcome.buses().iter().collect();
            ensure!(distinct.len() == n, "n={n}: SPE {} shares a bus", m.outcome);
            ensure!(m.values.d == int(n as i64), "n={n}: SPE D = {}", m.values.d);
        }
        let spos = a.spos(SocialFn::D).unwrap().ratio;
        let want = int(n as i64) / (int(1) + int(n as i64 - 1) * eps);
        ensure!(spos == want, "n={n}: spos(D) = {spos}, want {want}");
        let opt = common::optimum(&inst, SocialFn::D);
        ensure!(
            common::worst(&inst, SocialFn::D) <= int(n as i64) * opt,
            "n={n}: some outcome exceeds n * D(opt)"
        );
    }
    Ok("SPE use n buses with D = n; spos(D) = n/(1+(n-1)/8); D <= n D* for n = 2..4".into())
}

fn criterion_5() -> Check {
    for n in 2..=4usize {
        let inst: Instance = factory::epsilon_star(n, n, int(2), PermScheme::Identity).unwrap();
        let a = seq(&inst);
        let report = a.spoa(SocialFn::E).unwrap();
        let want = int(2 * n as i64 - 1);
        ensure!(report.ratio == want, "n={n}: spoa(E) = {}", report.ratio);
        ensure!(
            report
                .witnesses
                .iter()
                .any(|w| w.buses().iter().all(|&b| b == w.bus_of(0))),
            "n={n}: no all-on-one-bus witness"
        );
        let worst = common::worst(&inst, SocialFn::E);
        ensure!(worst == want, "n={n}: max outcome E = {worst}");
        ensure!(
            common::optimum(&inst, SocialFn::E) == int(1),
            "n={n}: optimum E is not 1"
        );
    }
    Ok("spoa(E) = 2n-1 with an all-on-one-bus witness, max E = 2n-1 for n = 2..4".into())
}

fn criterion_6() -> Check {
    let inst: Instance = factory::group_levels(1, 2, int(10), 0).unwrap();
    let left = |p: usize| p < 2;
    let a = seq(&inst);
    for m in &a.spe.members {
        for bus in 0..2 {
            let riders: Vec<usize> = (0..4).filter(|&p| m.outcome.bus_of(p) == bus).collect();
            let l = riders.iter().filter(|&&p| left(p)).count();
            ensure!(
                l == 1 && riders.len() == 2,
                "SPE {} bus {} riders {riders:?}",
                m.outcome,
                bus + 1
            );
        }
        ensure!(
            m.values.e == int(210),
            "SPE {} has E = {}",
            m.outcome,
            m.values.e
        );
    }
    ensure!(
        a.optimum(SocialFn::E).value == int(101),
        "optimal E = {}",
        a.optimum(SocialFn::E).value
    );
    ensure!(
        common::optimum(&inst, SocialFn::E) == int(101),
        "naive optimum disagrees"
    );
    let spos = a.spos(SocialFn::E).unwrap().ratio;
    ensure!(spos == r(210, 101), "spos(E) = {spos}");
    ensure!(
        spe_buses(&inst, &identity(&inst)) == common::spe_set(&inst, &identity(&inst)),
        "naive profile search disagrees"
    );
    Ok(format!(
        "{} SPE outcomes, each one L and one R per bus, E = 210; opt 101; spos 210/101",
        a.spe.len()
    ))
}

fn criterion_7() -> Check {
    let (n, m, eps) = (4i64, 2i64, r(1, 10));
    let inst: Instance = factory::zero_cluster_far(4, 2, eps).unwrap();
    let a = seq(&inst);
    for s in &a.spe.members {
        ensure!(
            s.values.u == int(6),
            "SPE {} has U = {}",
            s.outcome,
            s.values.u
        );
    }
    ensure!(
        a.optimum(SocialFn::U).value == r(21, 10),
        "optimal U = {}",
        a.optimum(SocialFn::U).value
    );
    ensure!(
        common::optimum(&inst, SocialFn::U) == r(21, 10),
        "naive optimum disagrees"
    );
    let spos = a.spos(SocialFn::U).unwrap().ratio;
    let closed = int(2 * n - m) / (int(m) + int(m * (m - 1)) * eps / int(2));
    ensure!(spos == closed, "spos(U) = {spos}, closed form {closed}");
    ensure!(spos == r(20, 7), "spos(U) = {spos}");
    let pos = sim(&inst)
        .pos(SocialFn::U)
        .map(|r| r.ratio.to_string())
        .unwrap_or_else(|e| e.to_string());
    Ok(format!(
        "SPE U = 6, opt U = 21/10, spos(U) = 20/7; measured pos(U) = {pos}"
    ))
}

fn criterion_8() -> Check {
    for n in 2..=4usize {
        let inst: Instance = factory::zero_cluster_single(n).unwrap();
        let spoa = seq(&inst).spoa(SocialFn::U).unwrap().ratio;
        ensure!(spoa == int(2 * n as i64 - 1), "n={n}: spoa(U) = {spoa}");
    }
    for (k, inst) in random_metric_instances().iter().enumerate() {
        let bound = int(2 * inst.n() as i64 - 1) * common::optimum(inst, SocialFn::U);
        let worst = common::worst(inst, SocialFn::U);
        ensure!(worst <= bound, "random instance {k}: U = {worst} > {bound}");
    }
    Ok("spoa(U) = 2n-1 for n = 2..4; U <= (2n-1) U* on 200 random metric instances".into())
}

fn criterion_9() -> Check {
    let mut with_ne = 0;
    for (k, inst) in random_metric_instances().iter().enumerate() {
        let nash = enumerate_nash(inst, &budget(), NashOptions::default()).unwrap();
        let naive = common::nash_set(inst);
        let got: BTreeSet<_> = nash.outcomes.iter().map(|o| o.buses().to_vec()).collect();
        ensure!(
            got == naive,
            "random instance {k}: NE set differs from the filter"
        );
        if nash.is_empty() {
            continue;
        }
        with_ne += 1;
        let (n, m) = (int(inst.n() as i64), int(inst.m() as i64));
        let bound = (int(2) * n / m + int(1)) * common::optimum(inst, SocialFn::U);
        for v in &nash.values {
            ensure!(
                v.u <= bound,
                "random instance {k}: NE with U = {} > {bound}",
                v.u
            );
        }
    }
    Ok(format!(
        "U(NE) <= (2n/m+1) U* on {with_ne} of 200 random metric instances with an NE"
    ))
}

fn criterion_10() -> Check {
    for (k, inst) in random_small_instances().iter().enumerate() {
        let order = identity(inst);
        let fast = spe_buses(inst, &order);
        let oracle: BTreeSet<_> = spe_oracle(inst, &order, &budget())
            .unwrap()
            .outcomes
            .outcomes()
            .map(|o| o.buses().to_vec())
            .collect();
        ensure!(
            fast == oracle,
            "instance {k}: spe_outcomes {fast:?} vs oracle {oracle:?}"
        );
        ensure!(
            fast == common::spe_set(inst, &order),
            "instance {k}: naive profile search disagrees"
        );
        let (z, _) = zermelo_outcome(inst, &order, &budget()).unwrap();
        ensure!(
            fast.contains(z.buses()),
            "instance {k}: zermelo outcome {z} not in SPE set"
        );
    }
    Ok("spe_outcomes = spe_oracle and zermelo in SPE on 100 random n=3, m=2 instances".into())
}

fn structural(inst: &Instance, label: &str) -> Result<(), String> {
    let t = inst.target();
    let (n, m) = (int(inst.n() as i64), int(inst.m() as i64));
    let metric = inst.is_metric();
    for sigma in common::all_outcomes(inst.n(), inst.m())
        .into_iter()
        .map(Outcome::new)
    {
        let ev = inst.evaluate(&sigma).unwrap();
        let c = &ev.costs.costs;
        let mut firsts = int(0);
        for bus in 0..inst.m() {
            let route = inst.bus_route(&sigma, bus).unwrap();
            if let Some(&p) = route.first() {
                firsts += c[p];
            }
            for (k, &p) in route.iter().enumerate() {
                let want = match route.get(k + 1) {
                    Some(&q) => *inst.d(p, q) + c[q],
                    None => *inst.d(p, t),
                };
                ensure!(
                    c[p] == want,
                    "{label} {sigma}: route recursion fails for player {}",
                    p + 1
                );
            }
        }
        let v = &ev.values;
        ensure!(
            v.d == firsts,
            "{label} {sigma}: D != sum of first-player costs"
        );
        ensure!(
            v.e <= v.d && v.d <= m * v.e,
            "{label} {sigma}: E <= D <= mE fails"
        );
        ensure!(
            v.e <= v.u && v.u <= n * v.e,
            "{label} {sigma}: E <= U <= nE fails"
        );
        if metric {
            for (i, ci) in c.iter().enumerate() {
                ensure!(
                    *ci >= *inst.d(i, t),
                    "{label} {sigma}: c_{} < d({},t)",
                    i + 1,
                    i + 1
                );
            }
        }
    }

    let alpha = r(7, 3);
    let scaled = inst.scaled(&alpha);
    for sigma in common::all_outcomes(inst.n(), inst.m())
        .into_iter()
        .map(Outcome::new)
    {
        ensure!(
            scaled.cost_vector(&sigma).unwrap() == inst.cost_vector(&sigma).unwrap().scaled(&alpha),
            "{label} {sigma}: scaling does not scale costs"
        );
    }
    let (a, b) = (sim(inst), sim(&scaled));
    ensure!(
        a.equilibria.outcomes == b.equilibria.outcomes,
        "{label}: scaling changes the NE set"
    );
    let (sa, sb) = (seq(inst), seq(&scaled));
    let outs = |s: &SequentialAnalysis<Rational>| s.spe.outcomes().cloned().collect::<Vec<_>>();
    ensure!(
        outs(&sa) == outs(&sb),
        "{label}: scaling changes the SPE set"
    );
    let ratio = |x: transit_games::Result<transit_games::RatioReport>| {
        x.map(|r| r.ratio).map_err(|e| e.to_string())
    };
    for f in SocialFn::ALL {
        ensure!(
            ratio(a.poa(f)) == ratio(b.poa(f)) && ratio(a.pos(f)) == ratio(b.pos(f)),
            "{label}: scaling changes PoA/PoS({f})"
        );
        ensure!(
            ratio(sa.spoa(f)) == ratio(sb.spoa(f)) && ratio(sa.spos(f)) == ratio(sb.spos(f)),
            "{label}: scaling changes SPoA/SPoS({f})"
        );
    }
    Ok(())
}

fn criterion_11() -> Check {
    let mut tested: Vec<(String, Instance)> = vec![
        ("example1".into(), factory::example1()),
        ("example2".into(), factory::example2()),
        (
            "group-levels".into(),
            factory::group_levels(1, 2, int(10), 0).unwrap(),
        ),
        (
            "group-levels pad 1".into(),
            factory::group_levels(1, 2, int(10), 1).unwrap(),
        ),
        (
            "zero-cluster-far".into(),
            factory::zero_cluster_far(4, 2, r(1, 10)).unwrap(),
        ),
    ];
    for x in [10, 100, 1000] {
        tested.push((
            format!("triangle X={x}"),
            factory::nonmetric_triangle(int(x)).unwrap(),
        ));
    }
    for n in 2..=4 {
        tested.push((
            format!("eps-star reverse n={n}"),
            factory::epsilon_star(n, n, r(1, 8), PermScheme::Reverse).unwrap(),
        ));
        tested.push((
            format!("eps-star identity n={n}"),
            factory::epsilon_star(n, n, int(2), PermScheme::Identity).unwrap(),
        ));
        tested.push((
            format!("zero-cluster-single n={n}"),
            factory::zero_cluster_single(n).unwrap(),
        ));
    }
    for (k, inst) in random_metric_instances().into_iter().enumerate() {
        tested.push((format!("random metric {k}"), inst));
    }
    for (k, inst) in random_small_instances().into_iter().enumerate() {
        tested.push((format!("random {k}"), inst));
    }
    for (label, inst) in &tested {
        structural(inst, label)?;
    }
    Ok(format!(
        "route recursion, D identity, orderings, metric bound, scaling on {} instances",
        tested.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("example 1 golden", criterion_1),
        ("example 2 SPE and oracle", criterion_2),
        ("nonmetric triangle", criterion_3),
        ("epsilon star, D", criterion_4),
        ("epsilon star, E", criterion_5),
        ("group levels, E", criterion_6),
        ("zero cluster far, U", criterion_7),
        ("zero cluster single and U bound", criterion_8),
        ("NE bound for U", criterion_9),
        ("SPE oracle equivalence", criterion_10),
        ("structural properties", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: panicked", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
