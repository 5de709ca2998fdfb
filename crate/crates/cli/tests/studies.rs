use planar_ortho::ExteriorMap;
use planar_ortho::C64;
use planar_ortho_cli::{run, Command, StudyConfig};

fn cfg(text: &str) -> StudyConfig {
    StudyConfig::from_text(text).unwrap()
}

#[test]
fn poly_disk_has_zero_error() {
    let r = run(Command::Poly, &cfg("nmax=20\ns=40.5")).unwrap();
    let t = r.table("poly.csv").unwrap();
    assert_eq!(t.rows.len(), 21);
    for e in t.column("rel_err").unwrap() {
        assert!(e <= 1e-13, "disk rel_err {e}");
    }
    // Monomial coefficients of π_n are a single entry at k = n.
    let c = r.table("poly_coeffs.csv").unwrap();
    for row in &c.rows {
        let (n, k): (usize, usize) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        let re: f64 = row[2].parse().unwrap();
        if n != k {
            assert!(re.abs() < 1e-12);
        }
    }
}

#[test]
fn poly_ellipse_rate_matches_two_ln_q() {
    let r = run(Command::Poly, &cfg("q=0.5\nnmin=4\nnmax=20\nsrule=linear\ns=2")).unwrap();
    let t = r.table("poly.csv").unwrap();
    let rate = *t.column("fitted_rate").unwrap().last().unwrap();
    let target = 2.0 * 0.5f64.ln();
    assert!(((rate - target) / target).abs() < 0.1, "rate {rate}");
    let m = r.table("moments.csv").unwrap();
    assert_eq!(m.rows.len(), 21 * 21);
}

#[test]
fn scaling_origin_ratio_is_one() {
    let r = run(Command::Scaling, &cfg("N=[10,20]\nsrule=linear\ns=2\ntheta=[0,1.3]")).unwrap();
    let t = r.table("scaling.csv").unwrap();
    for (re, im) in t.column("ratio_re").unwrap().iter().zip(t.column("ratio_im").unwrap()) {
        assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
    }
}

#[test]
fn scaling_disk_half_error_decreases() {
    let r = run(Command::Scaling, &cfg("N=[50,100,200]\nsrule=linear\ns=2\na=[0.3+0.2i]\nb=[-0.1]")).unwrap();
    let err = r.table("scaling.csv").unwrap().column("abs_err").unwrap();
    assert!(err[0] > err[1] && err[1] > err[2], "{err:?}");
    assert!(err[2] <= 0.02);
}

#[test]
fn scaling_weighted_ell_zero_outward_is_zero() {
    let r = run(Command::Scaling, &cfg("N=[40]\nweighted=true\na=[0.5]\nb=[0.5]")).unwrap();
    let t = r.table("scaling.csv").unwrap();
    assert_eq!(t.column("predictor_re").unwrap()[0], 0.0);
    assert_eq!(t.column("predictor_im").unwrap()[0], 0.0);
}

#[test]
fn corr_appendix_identities() {
    let r = run(Command::Corr, &cfg("grid=41\nextent=8")).unwrap();
    let tangent = r.table("corr_tangent.csv").unwrap();
    for r1 in tangent.column("r1").unwrap() {
        assert!((r1 - 1.0).abs() < 1e-13);
    }
    let surface = r.table("corr_surface.csv").unwrap();
    let (ell, a, b, r2) = (
        surface.column("ell").unwrap(),
        surface.column("a").unwrap(),
        surface.column("b").unwrap(),
        surface.column("r2").unwrap(),
    );
    for i in 0..r2.len() {
        if a[i] == b[i] {
            assert!(r2[i].abs() < 1e-13);
        }
        if ell[i] == 0.0 && (a[i] > 0.0 || b[i] > 0.0) {
            assert_eq!(r2[i], 0.0);
        }
    }
    let normal = r.table("corr_normal.csv").unwrap();
    let (ell, t, r1) = (normal.column("ell").unwrap(), normal.column("t").unwrap(), normal.column("r1").unwrap());
    for i in 0..r1.len() {
        if ell[i] == 0.0 && t[i] < 0.0 {
            assert_eq!(r1[i], 0.0);
        }
    }
}

#[test]
fn levelsets_follow_the_map() {
    let r = run(Command::Levelsets, &cfg("levels=[1,1.5]\ngrid=16")).unwrap();
    let t = &r.tables[0];
    let (lv, re, im) = (t.column("level").unwrap(), t.column("re").unwrap(), t.column("im").unwrap());
    for i in 0..lv.len() {
        assert!((C64::new(re[i], im[i]).norm() - lv[i]).abs() < 1e-14);
    }
    let r = run(Command::Levelsets, &cfg("q=0.5\nlevels=[1.25]\ngrid=8")).unwrap();
    let map = ExteriorMap::ellipse(0.5).unwrap();
    let t = &r.tables[0];
    let (k, re, im) = (t.column("k").unwrap(), t.column("re").unwrap(), t.column("im").unwrap());
    for i in 0..k.len() {
        let w = C64::from_polar(1.25, 2.0 * std::f64::consts::PI * (k[i] % 8.0) / 8.0);
        assert!((map.phi(w).unwrap() - C64::new(re[i], im[i])).norm() < 1e-14);
    }
    assert!(r.files[0].1.starts_with("<svg"));
}

#[test]
fn gap_matches_disk_oracle() {
    let r = run(Command::Gap, &cfg("N=[4]\ns=6\nradius=[0,0.5]")).unwrap();
    let t = r.table("gap.csv").unwrap();
    let value = t.column("value").unwrap();
    assert_eq!(value[0], 1.0);
    let expected: f64 = (0..4).map(|n| 1.0 - 0.5f64.powi(2 * n + 2) * (5 - n) as f64 / 6.0).product();
    assert!((value[1] - expected).abs() < 1e-6);
    assert!(t.column("abs_err").unwrap()[1] < 1e-6);
}

#[test]
fn gap_on_custom_domain_has_decaying_terms() {
    let r = run(Command::Gap, &cfg("domain=kind=custom cap=1 coeffs=[0,0.2,0.1i]\nN=[6]\ns=10\nradius=[0.4]")).unwrap();
    let gap = r.table("gap.csv").unwrap();
    assert!(gap.column("oracle").unwrap()[0].is_nan());
    let v = gap.column("value").unwrap()[0];
    assert!(v > 0.0 && v < 1.0);
    let terms = r.table("gap_terms.csv").unwrap().column("term").unwrap();
    assert_eq!(terms.len(), 7);
    assert!(terms[2..].windows(2).all(|w| w[1] <= w[0]), "{terms:?}");
}

#[test]
fn sample_outside_count_is_consistent() {
    let r = run(Command::Sample, &cfg("N=[8]\ns=12\nsamples=4000\nseed=7")).unwrap();
    let s = r.table("sample_summary.csv").unwrap();
    let mean = s.column("outside_mean").unwrap()[0];
    let se = s.column("outside_stderr").unwrap()[0];
    let expected = s.column("outside_expected").unwrap()[0];
    assert!((expected - 3.0).abs() < 1e-12);
    assert!((mean - expected).abs() <= 3.0 * se, "{mean} ± {se}");
    assert_eq!(r.table("samples.csv").unwrap().rows.len(), 4000 * 8);
    assert_eq!(r.table("histogram.csv").unwrap().rows.len(), 16);
}

#[test]
fn sample_rejects_other_domains() {
    let e = run(Command::Sample, &cfg("q=0.3\nN=[4]\ns=6")).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}
