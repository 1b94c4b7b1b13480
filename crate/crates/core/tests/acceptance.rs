//! Acceptance criteria 1-10. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; the process fails if any
//! criterion does.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vortexlab::diagnostics::{leapfrog_classify, poincare_section, LeapfrogClass};
use vortexlab::halfplane::{
    hamiltonian_halfplane, hamiltonian_halfplane_gradient, orbit_relative_residual_generic,
    orbit_residual_dipole, reachability_x_r_zero, restricted3_gradient, restricted3_hamiltonian,
    Normalization, ReducedDipoleOrbitParams, ReducedGenericOrbitParams, Restricted3State,
};
use vortexlab::integrate::events::EventKind;
use vortexlab::integrate::{integrate, monitor_invariants, IntegratorSettings, Model};
use vortexlab::membranes::{membrane_closed_form, SphereProductState};
use vortexlab::planar::{hamiltonian_plane, hamiltonian_plane_gradient};
use vortexlab::quadrant::{hamiltonian_quadrant, hamiltonian_quadrant_gradient, trajectory_constant};
use vortexlab::rings::{hamiltonian_rings, velocity_rings, Ring, RingSystem};
use vortexlab::scenario::green_oracle_suite;
use vortexlab::trajectory::Termination;
use vortexlab::{Trajectory, VortexSystem};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn settings(t_end: f64, dt: f64) -> IntegratorSettings {
    IntegratorSettings::default()
        .with_t_end(t_end)
        .with_tol(1e-10, 1e-12)
        .with_sample_dt(Some(dt))
}

fn run(model: &Model, y0: &[f64], set: &IntegratorSettings) -> Trajectory {
    integrate(model, y0, set).expect("integration starts")
}

/// Positions in a box with all pairwise distances at least `min_gap`.
fn spread_points(rng: &mut ChaCha8Rng, n: usize, x: (f64, f64), y: (f64, f64), min_gap: f64) -> Vec<[f64; 2]> {
    loop {
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.gen_range(x.0..x.1), rng.gen_range(y.0..y.1)])
            .collect();
        let ok = (0..n).all(|i| {
            (i + 1..n).all(|j| (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]) >= min_gap)
        });
        if ok {
            return pts;
        }
    }
}

fn signed_strength(rng: &mut ChaCha8Rng) -> f64 {
    let g = rng.gen_range(0.5..2.0);
    if rng.gen_bool(0.5) {
        g
    } else {
        -g
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut worst_name = String::new();
    let mut completed = true;
    for _ in 0..5 {
        let strengths: Vec<f64> = (0..4).map(|_| rng.gen_range(0.5..1.5)).collect();
        let pos = spread_points(&mut rng, 4, (-1.0, 1.0), (-1.0, 1.0), 0.4);
        let (model, y0) = Model::from_vortices(&VortexSystem::plane(strengths, pos), Normalization::Verbatim).unwrap();
        let tr = run(&model, &y0, &settings(100.0, 1.0));
        completed &= tr.termination == Termination::Completed;
        let rep = monitor_invariants(&model, &tr, 1e-8);
        for inv in &rep.invariants {
            if inv.max_rel_drift >= worst {
                worst = inv.max_rel_drift;
                worst_name = inv.name.clone();
            }
        }
    }
    outcome(
        completed && worst < 1e-8,
        format!("5 seeded 4-vortex plane runs to t=100, max relative drift {worst:.2e} ({worst_name}), limit 1e-8"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut completed = true;
    for _ in 0..10 {
        let pos = spread_points(&mut rng, 2, (-1.0, 1.0), (0.3, 2.0), 0.3);
        let sys = VortexSystem::half_plane(vec![1.0, 2.0], pos);
        let p = ReducedGenericOrbitParams::from_system(&sys).unwrap();
        let (model, y0) = Model::from_vortices(&sys, Normalization::Verbatim).unwrap();
        // the pair drifts far along the wall, so a tolerance relative to the
        // absolute coordinates is loose on the separation; tighten it
        let tr = run(&model, &y0, &settings(50.0, 0.05).with_tol(1e-12, 1e-14));
        completed &= tr.termination == Termination::Completed;
        for y in &tr.states {
            let r = orbit_relative_residual_generic(y[0] - y[2], y[1] - y[3], &p).unwrap();
            worst = worst.max(r.abs());
        }
    }
    outcome(
        completed && worst < 1e-6,
        format!("Gamma=(1,2), 10 seeded starts to t=50, max |residual|/e^(2 pi E) {worst:.2e}, limit 1e-6"),
    )
}

fn criterion_3() -> Outcome {
    let dipole = |pos: Vec<[f64; 2]>, t_end: f64| {
        let sys = VortexSystem::half_plane(vec![1.0, -1.0], pos);
        let p = ReducedDipoleOrbitParams::from_system(&sys).unwrap();
        let (model, y0) = Model::from_vortices(&sys, Normalization::Verbatim).unwrap();
        let tr = run(&model, &y0, &settings(t_end, 0.1));
        let mut worst: f64 = 0.0;
        for y in &tr.states {
            let r = orbit_residual_dipole(y[0] - y[2], 0.5 * (y[1] + y[3]), &p).unwrap();
            worst = worst.max(r.abs());
        }
        (p, tr, worst)
    };

    // C <= 1/nu^2: the pair escapes upward and its separation settles
    let (p1, tr1, res1) = dipole(vec![[-0.5, 1.1], [0.5, 0.9]], 400.0);
    let below = p1.c() <= 1.0 / (p1.nu * p1.nu) && !reachability_x_r_zero(&p1).unwrap().reachable;
    let y0_init = 1.0;
    let mut far_samples = 0;
    let mut asym_err: f64 = 0.0;
    for y in &tr1.states {
        if 0.5 * (y[1] + y[3]) > 10.0 * y0_init {
            far_samples += 1;
            let xr = y[0] - y[2];
            let d2 = xr * xr + p1.nu * p1.nu;
            asym_err = asym_err.max((d2 * p1.c() - 1.0).abs());
        }
    }

    // C > 1/nu^2: the orbit crosses x_r = 0
    let (p2, tr2, res2) = dipole(vec![[0.0, 3.0], [0.0, 1.0]], 100.0);
    let above = p2.c() > 1.0 / (p2.nu * p2.nu) && reachability_x_r_zero(&p2).unwrap().reachable;

    let completed = tr1.termination == Termination::Completed && tr2.termination == Termination::Completed;
    outcome(
        completed && below && above && res1 < 1e-6 && res2 < 1e-6 && far_samples > 0 && asym_err < 0.01,
        format!(
            "C<=1/nu^2: residual {res1:.2e}, asymptote error {:.3}% over {far_samples} samples with y0>10; \
             C>1/nu^2: residual {res2:.2e}; limits 1e-6 and 1%",
            100.0 * asym_err
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut approaches = 0;
    let mut boundary = 0;
    let mut min_gap = f64::INFINITY;
    let mut min_height = f64::INFINITY;
    let mut completed = true;
    for _ in 0..20 {
        let strengths = vec![signed_strength(&mut rng), signed_strength(&mut rng)];
        let pos = spread_points(&mut rng, 2, (-1.0, 1.0), (0.5, 2.0), 0.3);
        let (model, y0) =
            Model::from_vortices(&VortexSystem::half_plane(strengths, pos), Normalization::Verbatim).unwrap();
        let mut set = settings(100.0, 0.05);
        set.events.close_approach = Some(1e-3);
        set.events.boundary = Some(1e-3);
        let tr = run(&model, &y0, &set);
        completed &= tr.termination == Termination::Completed;
        for e in &tr.events {
            match e.kind {
                EventKind::CloseApproach { .. } => approaches += 1,
                EventKind::BoundaryApproach { .. } => boundary += 1,
                _ => {}
            }
        }
        for y in &tr.states {
            min_gap = min_gap.min((y[0] - y[2]).hypot(y[1] - y[3]));
            min_height = min_height.min(y[1].min(y[3]));
        }
    }
    outcome(
        completed && approaches == 0 && boundary == 0,
        format!(
            "20 seeded pairs to t=100: {approaches} close-approach and {boundary} boundary events at 1e-3 \
             (sampled min separation {min_gap:.3}, min height {min_height:.3})"
        ),
    )
}

fn criterion_5() -> Outcome {
    let (model, y0) = Model::from_vortices(
        &VortexSystem::new(vortexlab::Domain::Quadrant, vec![1.0], vec![[1.0, 1.0]]),
        Normalization::Verbatim,
    )
    .unwrap();
    let tr = run(&model, &y0, &settings(50.0, 0.01));
    let c0 = 2f64.sqrt();
    let mut drift: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for y in &tr.states {
        let c = trajectory_constant(y[0], y[1]).unwrap();
        drift = drift.max((c - c0).abs() / c0);
        margin = margin.min(y[0].min(y[1]) - c0 / 2.0);
    }
    outcome(
        tr.termination == Termination::Completed && drift < 1e-8 && margin >= -1e-8,
        format!("from (1,1) to t=50: |C-sqrt2|/sqrt2 {drift:.2e} (limit 1e-8), min(x,y) - C/2 = {margin:.3e}"),
    )
}

fn criterion_6() -> Outcome {
    let rep = green_oracle_suite(10_000, 0).unwrap();
    outcome(
        rep.max_rel_diff < 1e-9 && rep.max_gradient_rel_err < 1e-6,
        format!(
            "10^4 seeded inputs: max rel diff {:.2e} (limit 1e-9), gradient vs FD {:.2e} (limit 1e-6)",
            rep.max_rel_diff, rep.max_gradient_rel_err
        ),
    )
}

/// Two identical thin-cored rings of unit radius, 0.4 apart on the axis.
fn leapfrog_rings() -> RingSystem {
    let ring = |z| Ring {
        z,
        r: 1.0,
        gamma: 1.0,
        a: 0.05,
    };
    RingSystem::new(vec![ring(0.0), ring(0.4)])
}

fn criterion_7() -> Outcome {
    let (model, y0) = Model::from_rings(&leapfrog_rings()).unwrap();
    let tr = run(&model, &y0, &settings(50.0, 0.01));
    let rep = monitor_invariants(&model, &tr, 1e-8);
    let h = rep.get("H").unwrap().max_rel_drift;
    let m = rep.get("M").unwrap().max_rel_drift;
    let class = leapfrog_classify(&model, &tr).unwrap();
    outcome(
        tr.termination == Termination::Completed && h < 1e-8 && m < 1e-8 && class == LeapfrogClass::Leapfrog,
        format!("2 identical rings to t=50: H drift {h:.2e}, sum Gamma R^2 drift {m:.2e} (limit 1e-8), class {class:?}"),
    )
}

fn criterion_8() -> Outcome {
    let mut worst_closed: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    let mut collapse_err = f64::INFINITY;
    for (m, l) in [(1, 1), (1, 2), (2, 1)] {
        let st = SphereProductState::new(1.0, 1.0, m, l);
        let (model, y0) = Model::from_membrane(&st).unwrap();
        let tr = run(&model, &y0, &settings(5.0, 0.001));
        for (t, y) in tr.times.iter().zip(&tr.states) {
            if y[0] <= 1e-3 {
                break;
            }
            let [a, b] = membrane_closed_form(1.0, 1.0, m, l, *t).unwrap();
            worst_closed = worst_closed.max(((y[0] - a) / a).abs()).max(((y[1] - b) / b).abs());
            let inv = m as f64 * y[0].ln() + l as f64 * y[1].ln();
            worst_inv = worst_inv.max(inv.abs());
        }
        if (m, l) == (1, 2) {
            let collapses: Vec<_> = tr
                .events
                .iter()
                .filter(|e| e.kind == EventKind::Collapse)
                .filter_map(|e| e.collapse_time)
                .collect();
            if collapses.len() == 1 {
                collapse_err = (collapses[0] - 1.0).abs();
            }
        }
    }
    outcome(
        worst_closed < 1e-8 && worst_inv < 1e-9 && collapse_err < 1e-6,
        format!(
            "(m,l) in {{(1,1),(1,2),(2,1)}}: closed-form rel err {worst_closed:.2e} (limit 1e-8), \
             ln(a^m b^l) drift {worst_inv:.2e} (limit 1e-9), |t_collapse - 1| {collapse_err:.2e} (limit 1e-6)"
        ),
    )
}

fn criterion_9() -> Outcome {
    let set = IntegratorSettings::default().with_tol(1e-11, 1e-13);
    let starts = [[0.0, 2.0], [0.0, 0.4], [2.0, 0.0], [0.6, 1.5], [1.0, 1.0]];
    let mut regular: f64 = 0.0;
    let mut points = 0;
    for p in starts {
        let sec = poincare_section(&Restricted3State::new(p[0], p[1], 0.0), 100, &set, 10.0).unwrap();
        points += sec.points.len();
        regular = regular.max(sec.max_h0_deviation().unwrap());
    }
    // the separatrix of H0 passes through the saddle at the origin
    let perturbed = poincare_section(&Restricted3State::new(0.05, 0.0, 0.01), 100, &set, 10.0).unwrap();
    let chaotic = perturbed.max_h0_deviation().unwrap();
    outcome(
        points == 500 && regular < 1e-6 && chaotic > 1e-5,
        format!(
            "eps=0: max |dH0| {regular:.2e} over {points} section points (limit 1e-6); \
             eps=0.01 near separatrix: max |dH0| {chaotic:.2e} (must exceed 1e-5)"
        ),
    )
}

fn rel_err(analytic: &[f64], fd: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(fd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let norm: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
    diff / norm
}

/// Central differences with step `1e-6` of `f` around `x`.
fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let h = 1e-6;
    (0..x.len())
        .map(|k| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            (f(&xp) - f(&xm)) / (2.0 * h)
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = [0.0f64; 5];
    for _ in 0..100 {
        // plane
        let strengths: Vec<f64> = (0..4).map(|_| signed_strength(&mut rng)).collect();
        let sys = VortexSystem::plane(strengths, spread_points(&mut rng, 4, (-2.0, 2.0), (-2.0, 2.0), 0.2));
        let g: Vec<f64> = hamiltonian_plane_gradient(&sys).unwrap().concat();
        let fd = fd_gradient(|s| hamiltonian_plane(&sys.with_flat_positions(s)).unwrap(), &sys.flat_positions());
        worst[0] = worst[0].max(rel_err(&g, &fd));

        // half-plane
        let strengths: Vec<f64> = (0..3).map(|_| signed_strength(&mut rng)).collect();
        let sys = VortexSystem::half_plane(strengths, spread_points(&mut rng, 3, (-2.0, 2.0), (0.2, 2.0), 0.2));
        let g: Vec<f64> = hamiltonian_halfplane_gradient(&sys).unwrap().concat();
        let fd = fd_gradient(|s| hamiltonian_halfplane(&sys.with_flat_positions(s)).unwrap(), &sys.flat_positions());
        worst[1] = worst[1].max(rel_err(&g, &fd));

        // restricted three-vortex, at a random time
        let (x, y) = loop {
            let (x, y): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if x.hypot(y - 1.0) > 0.2 && x.hypot(y + 1.0) > 0.2 {
                break (x, y);
            }
        };
        let st = Restricted3State::new(x, y, rng.gen_range(0.0..0.05));
        let t = rng.gen_range(0.0..100.0);
        let g = restricted3_gradient(&st, t).unwrap();
        let fd = fd_gradient(|p| restricted3_hamiltonian(&st.at(p[0], p[1]), t).unwrap(), &[x, y]);
        worst[2] = worst[2].max(rel_err(&g, &fd));

        // quadrant
        let (x, y) = (rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
        let gamma = signed_strength(&mut rng);
        let g = hamiltonian_quadrant_gradient(gamma, x, y).unwrap();
        let fd = fd_gradient(|p| hamiltonian_quadrant(gamma, p[0], p[1]).unwrap(), &[x, y]);
        worst[3] = worst[3].max(rel_err(&g, &fd));

        // rings: (dH/dZ, dH/dR) = Gamma R (-dR/dt, dZ/dt), cores following R
        let pts = spread_points(&mut rng, 3, (-1.0, 1.0), (0.5, 2.0), 0.3);
        let rings = RingSystem::new(
            pts.iter()
                .map(|p| Ring {
                    z: p[0],
                    r: p[1],
                    gamma: signed_strength(&mut rng),
                    a: 0.05 * p[1],
                })
                .collect(),
        );
        let v = velocity_rings(&rings).unwrap();
        let g: Vec<f64> = rings
            .rings
            .iter()
            .zip(&v)
            .flat_map(|(r, v)| [-r.gamma * r.r * v[1], r.gamma * r.r * v[0]])
            .collect();
        let fd = fd_gradient(|s| hamiltonian_rings(&rings.moved_to(s)).unwrap(), &rings.flat_state());
        worst[4] = worst[4].max(rel_err(&g, &fd));
    }
    outcome(
        worst.iter().all(|&w| w < 1e-6),
        format!(
            "100 seeded points each, max rel err: plane {:.1e}, half-plane {:.1e}, restricted-3 {:.1e}, \
             quadrant {:.1e}, rings {:.1e} (limit 1e-6)",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("conservation suite", criterion_1, Some(Duration::from_secs(10))),
        ("generic pair orbit", criterion_2, Some(Duration::from_secs(10))),
        ("dipole orbit and asymptote", criterion_3, None),
        ("half-plane non-collision", criterion_4, None),
        ("quadrant trajectory", criterion_5, None),
        ("ring Green function", criterion_6, Some(Duration::from_secs(30))),
        ("ring leapfrog", criterion_7, None),
        ("membrane closed forms", criterion_8, None),
        ("restricted three-vortex sections", criterion_9, Some(Duration::from_secs(60))),
        ("gradient suite", criterion_10, None),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = budget.map_or(true, |b| elapsed < b);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget_note = budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
        println!(
            "criterion {:>2} [{}] {name}: {} ({:.2}s{budget_note})",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
