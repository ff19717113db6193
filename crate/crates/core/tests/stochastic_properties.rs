//! Distributional properties of the network and mixture samplers.

use mrc_outage::analytic::SystemParams;
use mrc_outage::exec::trial_rng;
use mrc_outage::stochastic::{
    estimate_joint_ccdf, simulate_mrc_outage_ppp, EstimateCI, InterferenceModel,
    NetworkRealization, PppField, SimConfig, TrialDraw, Window,
};

fn default_field(params: &SystemParams) -> PppField {
    PppField::new(params, Window::Auto.resolve(params.lambda_p()).unwrap()).unwrap()
}

/// Per-antenna outage `P(h_i / I_i < s)` for every antenna of an `N`-antenna draw.
fn branch_outages(
    params: &SystemParams,
    model: InterferenceModel,
    antennas: usize,
    trials: u64,
) -> Vec<EstimateCI> {
    let field = default_field(params);
    let s = params.s_max(10f64.powf(0.1));
    let mut hits = vec![0u64; antennas];
    let mut draw = TrialDraw::default();
    let mut scratch = Vec::new();
    for t in 0..trials {
        draw.draw(&field, model, antennas, &mut trial_rng(41, t), &mut scratch);
        for (i, hit) in hits.iter_mut().enumerate() {
            if draw.serving[i] / draw.interference[i] < s {
                *hit += 1;
            }
        }
    }
    hits.into_iter()
        .map(|h| EstimateCI::from_counts(h, trials))
        .collect()
}

#[test]
fn antennas_are_exchangeable() {
    let params = SystemParams::default();
    for model in [
        InterferenceModel::Ppp,
        InterferenceModel::Mixture { q: 0.8 },
    ] {
        let est = branch_outages(&params, model, 4, 60_000);
        let (first, last) = (est[0], est[3]);
        let tolerance = 3.0 * first.stderr.hypot(last.stderr);
        assert!(
            (first.mean - last.mean).abs() <= tolerance,
            "{model:?}: antenna 1 {first:?} vs antenna 4 {last:?}"
        );
    }
}

/// Two-sample Kolmogorov–Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[test]
fn mixture_preserves_the_marginal_interference_law() {
    let params = SystemParams::default();
    let field = default_field(&params);
    let sample = |model: InterferenceModel, seed: u64, antenna: usize| -> Vec<f64> {
        let mut draw = TrialDraw::default();
        let mut scratch = Vec::new();
        (0..20_000)
            .map(|t| {
                draw.draw(&field, model, 3, &mut trial_rng(seed, t), &mut scratch);
                draw.interference[antenna]
            })
            .collect()
    };
    let ppp = sample(InterferenceModel::Ppp, 5, 0);
    for (q, antenna) in [(0.0, 0), (0.6, 1), (0.93, 2), (1.0, 0)] {
        let mixture = sample(InterferenceModel::Mixture { q }, 6, antenna);
        let (n, m) = (ppp.len() as f64, mixture.len() as f64);
        // 1% critical value of the two-sample test
        let critical = 1.628 * ((n + m) / (n * m)).sqrt();
        let d = ks_statistic(ppp.clone(), mixture);
        assert!(
            d < critical,
            "q = {q}, antenna {antenna}: D = {d} >= {critical}"
        );
    }
}

#[test]
fn doubling_the_window_does_not_move_single_antenna_outage() {
    // Points of the doubled window that fall in the default window form the
    // default-window process, so both estimates come from the same draws.
    let params = SystemParams::default();
    let half_width = Window::Auto.resolve(params.lambda_p()).unwrap();
    let outer = PppField::new(&params, 2.0 * half_width).unwrap();
    let s = params.s_max(10f64.powf(0.1));
    let trials = 1_000_000;
    let (mut inner_hits, mut outer_hits) = (0u64, 0u64);
    for t in 0..trials {
        let net = NetworkRealization::sample(&outer, 1, &mut trial_rng(77, t));
        let (mut near, mut far) = (0.0, 0.0);
        for (p, h) in net.points.iter().zip(&net.fading[0]) {
            let contribution = h * outer.path_gain(p[0] * p[0] + p[1] * p[1]);
            if p[0].abs() <= half_width && p[1].abs() <= half_width {
                near += contribution;
            } else {
                far += contribution;
            }
        }
        let h = net.serving_fading[0];
        inner_hits += u64::from(near > 0.0 && h / near < s);
        outer_hits += u64::from(h / (near + far) < s);
    }
    let inner = EstimateCI::from_counts(inner_hits, trials);
    let outer = EstimateCI::from_counts(outer_hits, trials);
    assert!(
        (outer.mean - inner.mean).abs() < inner.stderr,
        "window L: {inner:?}, window 2L: {outer:?}"
    );
}

#[test]
fn mean_interference_matches_campbell_integral() {
    // ε > 0 keeps E[I] finite
    let params = SystemParams::with_intensity(1e-2, 4.0, 10.0)
        .unwrap()
        .with_epsilon(1.0)
        .unwrap();
    let field = default_field(&params);
    let l = field.half_width;
    let eps = params.epsilon;

    // λp ∫_{[-L,L]²} dx / (ε + |x|⁴): eight symmetric triangles in polar form,
    // with the radial integral ∫ r dr / (ε + r⁴) = atan(r²/√ε) / (2√ε) in closed form.
    let radial = |theta: f64| {
        let r = l / theta.cos();
        (r * r / eps.sqrt()).atan() / (2.0 * eps.sqrt())
    };
    let panels = 2_000;
    let h = std::f64::consts::FRAC_PI_4 / panels as f64;
    let simpson: f64 = (0..=panels)
        .map(|k| {
            let w = if k == 0 || k == panels {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * radial(k as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    let campbell = params.lambda_p() * 8.0 * simpson;

    let trials = 200_000u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut draw = TrialDraw::default();
    let mut scratch = Vec::new();
    for t in 0..trials {
        draw.draw(
            &field,
            InterferenceModel::Ppp,
            1,
            &mut trial_rng(3, t),
            &mut scratch,
        );
        let i = draw.interference[0];
        sum += i;
        sum_sq += i * i;
    }
    let n = trials as f64;
    let mean = sum / n;
    let stderr = ((sum_sq / n - mean * mean) / (n - 1.0)).sqrt();
    assert!(
        (mean - campbell).abs() <= 3.0 * stderr,
        "sample mean {mean} ± {stderr} vs Campbell {campbell}"
    );
}

#[test]
fn joint_ccdf_of_an_empty_network_is_one() {
    let params = SystemParams::with_intensity(0.0, 4.0, 10.0).unwrap();
    let est = estimate_joint_ccdf(
        &params,
        3,
        10.0,
        &SimConfig::new(500, 1),
        InterferenceModel::Ppp,
    )
    .unwrap();
    assert_eq!(est.mean, 1.0);
    let outage = simulate_mrc_outage_ppp(&params, 3, 10.0, &SimConfig::new(500, 1)).unwrap();
    assert_eq!(outage.mean, 0.0);
}
