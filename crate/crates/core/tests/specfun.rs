use num_complex::Complex64;
use proptest::prelude::*;
use resonance_poles::specfun::{bessel_j, cyl_bessel_family};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(Re z, Im z, n, J_n(z), Y_n(z))` from 40-digit arbitrary precision.
const REFERENCE: &[(f64, f64, usize, [f64; 2], [f64; 2])] = &[
    (0.5, 0.0, 0, [9.384698072408129e-1, 0.0], [-4.4451873350670656e-1, 0.0]),
    (0.5, 0.0, 1, [2.4226845767487389e-1, 0.0], [-1.4714723926702431, 0.0]),
    (0.5, 0.0, 7, [1.2015867327763023e-8, 0.0], [-3.7942958668891114e+6, 0.0]),
    (0.5, 0.0, 20, [3.7272019617047145e-31, 0.0], [-4.2714301215659064e+28, 0.0]),
    (0.5, 0.0, 40, [1.0122626959003594e-72, 0.0], [-7.8619604848825331e+69, 0.0]),
    (3.7, 0.4, 0, [-4.3269097282567677e-1, -2.0865458473035842e-2], [1.0545144757774227e-1, -1.7079554173230474e-1]),
    (3.7, 0.4, 1, [4.8785101451480697e-2, -1.6910379772423245e-1], [4.4774219343564586e-1, -3.6144933915606841e-3]),
    (3.7, 0.4, 7, [7.8749910430252352e-3, 6.0688256399507071e-3], [-4.4389169674382852, 3.1011269706529622]),
    (3.7, 0.4, 20, [-4.5086019686380189e-14, 7.3951195599588884e-14], [9.6705347980121906e+10, 1.5999794875682605e+11]),
    (3.7, 0.4, 40, [-2.8410664861121219e-38, -6.3130662634625974e-38], [4.7472350882516972e+34, -1.0522459832034558e+35]),
    (12.5, -2.0, 0, [5.9728676641843586e-1, -5.7247078348653597e-1], [-5.9694541120324955e-1, -5.7943831629820849e-1]),
    (12.5, -2.0, 1, [-5.7042611980836143e-1, -5.9859250307783104e-1], [-6.1751234161774856e-1, 5.464723313618897e-1]),
    (12.5, -2.0, 7, [-6.2460461921965867e-1, 2.2270591769114955e-1], [2.4818790999470341e-1, 5.867925343255899e-1]),
    (12.5, -2.0, 20, [-5.4037029499553509e-4, -3.8726389801950048e-4], [2.2604506087277972e+1, -1.9956330271954791e+1]),
    (12.5, -2.0, 40, [5.2757082821264708e-17, 1.3408555191229504e-17], [-1.482344305332099e+14, 4.0413886288721678e+13]),
    (25.0, 10.0, 0, [1.2614513067716826e+3, 1.1340266459004162e+3], [-1.1340266521502128e+3, 1.2614513036895841e+3]),
    (25.0, 10.0, 1, [-1.1044585972737247e+3, 1.2725999938921925e+3], [-1.2725999971029113e+3, -1.1044585910328481e+3]),
    (25.0, 10.0, 7, [-1.5401659037104407e+2, -1.2099976131297567e+3], [1.2099976226789504e+3, -1.5401659309810284e+2]),
    (25.0, 10.0, 20, [8.1108362995896877e+1, -1.0777267581629644e+1], [1.0777180740306123e+1, 8.1108214972754872e+1]),
    (25.0, 10.0, 40, [5.9091846018506999e-5, -4.4994227840690633e-5], [-8.036097223342522e+1, -9.5016007431282925e+1]),
    (-7.0, 3.0, 0, [2.9064047556003742, 3.4598542300676212e-1], [-3.5000827566614112e-1, 2.9201200369681231]),
    (-7.0, 3.0, 1, [-5.1305099539781296e-1, 2.801196351625501], [-2.7868731566248336, -5.0972470257319596e-1]),
    (-7.0, 3.0, 7, [-1.7490900965709986e-1, 6.7708470150897214e-1], [-6.2212604110124239e-1, -1.3240957700236864e-1]),
    (-7.0, 3.0, 20, [2.7724516089507972e-8, -1.0125905391717843e-7], [-5.0940391470194214e+4, -1.5090650989118109e+5]),
    (-7.0, 3.0, 40, [-1.5784295581999453e-25, 3.6976656525553024e-26], [4.8541528767684971e+22, 1.0683948996855795e+22]),
    (48.3, 0.1, 0, [-1.0679154659571263e-1, 4.4627872917628252e-3], [-4.3676117034917516e-2, -1.0599517375346302e-2]),
    (48.3, 0.1, 1, [-4.4783741920313725e-2, -1.0551593684723483e-2], [1.0634495327578196e-1, -4.571827764300972e-3]),
    (48.3, 0.1, 7, [9.0578250339817887e-2, 7.0492773668338288e-3], [-7.2434343841333263e-2, 9.0094586369432036e-3]),
    (48.3, 0.1, 20, [1.4721914583079771e-2, -1.0905790883080142e-2], [1.1992284904487933e-1, 1.1880531084883133e-3]),
    (48.3, 0.1, 40, [-1.19566471919533e-1, -5.0071500372872999e-3], [9.5695247632710255e-2, -7.0392078624963034e-3]),
    (0.001, 0.002, 0, [1.0000007499998906, -1.0000003750000191e-6], [-3.9591206316281575, 7.0483788906313468e-1]),
    (0.001, 0.002, 1, [5.0000068750010678e-4, 1.0000001249999011e-3], [-1.2732679802352598e+2, 2.5464398393552925e+2]),
    (0.001, 0.002, 7, [4.4952935064410981e-26, 4.3092761414542859e-25], [-1.0889331034595176e+22, 1.0438721166821864e+23]),
    (0.001, 0.002, 20, [-3.7839963326600613e-78, -5.789634410795937e-79], [4.1097914067878627e+75, -6.2881109970412055e+74]),
    (0.001, 0.002, 40, [1.0144200688788735e-166, 3.1786015004966083e-167], [-7.1432782660078095e+163, 2.2382872354208466e+163]),
    (2.33, -0.0037, 0, [3.9424556402210036e-2, 1.977045329655494e-3], [5.1628867490163024e-1, 2.4797913164570201e-4]),
    (2.33, -0.0037, 1, [5.3433819286661099e-1, 7.0264193994466961e-4], [6.7022591250087672e-2, -1.8038296270290152e-3]),
    (2.33, -0.0037, 7, [4.8690101445958623e-4, -5.1450517038300505e-6], [-9.9204827993251893e+1, -1.0278319152815317]),
    (2.33, -0.0037, 20, [8.1673081996174383e-18, -2.5779485879641442e-19], [-1.9601264601106075e+15, -6.1826912489057593e+13]),
    (2.33, -0.0037, 40, [5.3230179910207637e-46, -3.3800729293168413e-47], [-1.4914999538693013e+43, -9.4700926929996315e+41]),
    (9.6, 16.9, 0, [-1.9816278667284044e+6, -1.7164568348074315e+5], [1.7164568348075064e+5, -1.981627866728401e+6]),
    (9.6, 16.9, 1, [1.4199896797914168e+5, -1.9392005795196925e+6], [1.9392005795196961e+6, 1.4199896797913407e+5]),
    (9.6, 16.9, 7, [3.4196786902358344e+5, 5.5694803429244886e+5], [-5.5694803429246943e+5, 3.4196786902359621e+5]),
    (9.6, 16.9, 20, [8.258983345992416e+1, -2.4951934356710396e+2], [2.4951934032891754e+2, 8.2589787013348329e+1]),
    (9.6, 16.9, 40, [-1.0788943226212443e-8, 7.3191306929467047e-9], [4.4265777183632677e+5, 3.6207243984739888e+5]),
];

#[test]
fn matches_high_precision_values() {
    for &(re, im, n, j, y) in REFERENCE {
        let f = cyl_bessel_family(40, c(re, im)).unwrap();
        let (j, y) = (c(j[0], j[1]), c(y[0], y[1]));
        assert!((f.j[n] - j).norm() <= 1e-10 * j.norm(), "J_{n}({re}+{im}i) = {} vs {j}", f.j[n]);
        assert!((f.y[n] - y).norm() <= 1e-10 * y.norm(), "Y_{n}({re}+{im}i) = {} vs {y}", f.y[n]);
    }
}

/// Independent 40-term ascending series for `J_0`.
fn j0_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= -(x * x / 4.0) / (k * k) as f64;
        sum += term;
    }
    sum
}

/// `Y_0(x) = (2/π)(ln(x/2) + γ) J_0(x) + (2/π) Σ (-1)^{k+1} H_k (x²/4)^k / (k!)²`.
fn y0_series(x: f64) -> f64 {
    let gamma = 0.577_215_664_901_532_9;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..40 {
        term *= -(x * x / 4.0) / (k * k) as f64;
        harmonic += 1.0 / k as f64;
        sum -= term * harmonic;
    }
    2.0 / std::f64::consts::PI * (((x / 2.0).ln() + gamma) * j0_series(x) + sum)
}

#[test]
fn unit_argument_spot_values() {
    let f = cyl_bessel_family(0, c(1.0, 0.0)).unwrap();
    assert!((f.j[0].re - 0.7651976865579666).abs() <= 1e-12);
    assert!((f.y[0].re - 0.0882569642156769).abs() <= 1e-10);
    assert!((f.j[0].re - j0_series(1.0)).abs() <= 1e-14);
    assert!((f.y[0].re - y0_series(1.0)).abs() <= 1e-14);
    for x in [0.1, 0.7, 2.5, 4.0] {
        let f = cyl_bessel_family(0, c(x, 0.0)).unwrap();
        assert!((f.j[0].re - j0_series(x)).abs() <= 1e-13, "{x}");
        assert!((f.y[0].re - y0_series(x)).abs() <= 1e-13, "{x}");
    }
}

#[test]
fn origin_gives_j_and_flags_the_rest() {
    let f = cyl_bessel_family(3, c(0.0, 0.0)).unwrap();
    assert_eq!(f.j, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(f.singular_at_origin);
    assert!(f.y.iter().all(|v| v.re.is_nan()));
}

#[test]
fn non_finite_argument_is_an_error() {
    assert!(cyl_bessel_family(2, c(f64::INFINITY, 0.0)).is_err());
    assert!(cyl_bessel_family(2, c(1.0, f64::NAN)).is_err());
}

fn grid() -> Vec<Complex64> {
    let mut out = Vec::with_capacity(200);
    for a in 0..20 {
        for b in 0..10 {
            let r = 1e-3 * 5e4f64.powf(a as f64 / 19.0);
            let theta = -std::f64::consts::PI + (b as f64 + 0.5) * std::f64::consts::PI / 5.0;
            out.push(Complex64::from_polar(r, theta));
        }
    }
    out
}

#[test]
fn wronskian_over_the_grid() {
    let mut worst = 0.0f64;
    for z in grid() {
        let f = cyl_bessel_family(41, z).unwrap();
        let target = c(2.0 / std::f64::consts::PI, 0.0) / z;
        for n in 0..=40 {
            let (p, q) = (f.j[n + 1] * f.y[n], f.j[n] * f.y[n + 1]);
            let e = (p - q - target).norm() / target.norm().max(p.norm()).max(q.norm());
            assert!(e <= 1e-11, "z = {z}, n = {n}: {e:e}");
            worst = worst.max(e);
        }
    }
    assert!(worst > 0.0);
}

#[test]
fn upward_recurrence_over_the_grid() {
    for z in grid() {
        let f = cyl_bessel_family(40, z).unwrap();
        for n in 1..40 {
            let factor = c(2.0 * n as f64, 0.0) / z;
            for (name, v) in [("J", &f.j), ("Y", &f.y)] {
                let lhs = v[n + 1];
                let a = factor * v[n];
                let scale = lhs.norm().max(a.norm()).max(v[n - 1].norm());
                let e = (a - v[n - 1] - lhs).norm() / scale;
                assert!(e <= 1e-11, "{name}: z = {z}, n = {n}: {e:e}");
            }
        }
    }
}

#[test]
fn derivative_recurrence() {
    for z in grid().into_iter().step_by(7) {
        let f = cyl_bessel_family(30, z).unwrap();
        for n in 1..=30 {
            let expect = f.j[n - 1] - c(n as f64, 0.0) / z * f.j[n];
            let scale = expect.norm().max(f.j[n - 1].norm());
            assert!((f.j_prime[n] - expect).norm() <= 1e-12 * scale, "z = {z}, n = {n}");
        }
    }
}

proptest! {
    #[test]
    fn conjugation_symmetry(re in -50.0f64..50.0, im in 0.01f64..20.0, n in 0usize..=40) {
        let z = c(re, im);
        let a = cyl_bessel_family(n, z).unwrap();
        let b = cyl_bessel_family(n, z.conj()).unwrap();
        prop_assert!((a.j[n].conj() - b.j[n]).norm() <= 1e-14 * a.j[n].norm());
        prop_assert!((a.y[n].conj() - b.y[n]).norm() <= 1e-14 * a.y[n].norm());
    }

    #[test]
    fn small_argument_leading_term(r in 1e-7f64..1e-4, theta in -3.1f64..3.1, n in 0u32..8) {
        let z = Complex64::from_polar(r, theta);
        let mut lead = c(1.0, 0.0);
        for k in 1..=n {
            lead *= z / (2.0 * k as f64);
        }
        let j = bessel_j(n as i64, z).unwrap();
        prop_assert!((j - lead).norm() <= 1e-8 * lead.norm());
    }

    #[test]
    fn hankel_is_j_plus_i_y(re in 0.1f64..50.0, im in -20.0f64..20.0) {
        let f = cyl_bessel_family(12, c(re, im)).unwrap();
        for n in 0..=12 {
            prop_assert_eq!(f.h1[n], f.j[n] + c(0.0, 1.0) * f.y[n]);
        }
    }

    #[test]
    fn negative_orders_by_parity(re in 0.1f64..30.0, im in -5.0f64..5.0, n in 1i64..20) {
        let f = cyl_bessel_family(n as usize, c(re, im)).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(f.j_signed(-n), f.j[n as usize] * sign);
        prop_assert_eq!(f.y_signed(-n), f.y[n as usize] * sign);
    }
}
