use num_complex::Complex64;
use yoccoz_core::dynamics::{find_center, QuadraticMap};
use yoccoz_core::lemmas::{LemmaEntry, LemmaRegistry, VerifyContext};
use yoccoz_core::puzzle::checks::Verdict;
use yoccoz_core::renorm::{Bounds, RenormOptions};

fn run(c: Complex64) -> Vec<LemmaEntry> {
    let map = QuadraticMap::new(c);
    let ctx = VerifyContext::new(&map, Bounds::new(4, 4, 4), RenormOptions::default());
    LemmaRegistry::standard().run(&ctx)
}

fn status(entries: &[LemmaEntry], id: &str) -> Verdict {
    entries.iter().find(|e| e.id == id).unwrap_or_else(|| panic!("missing {id}")).status
}

#[test]
fn registry_lookup() {
    let reg = LemmaRegistry::standard();
    assert_eq!(reg.ids().len(), 8);
    assert!(reg.get("qv").is_some());
    assert!(reg.get("nonexistent").is_none());
}

#[test]
fn airplane_satisfies_every_lemma() {
    let c = find_center(3, Complex64::new(-1.75, 0.0)).unwrap();
    let entries = run(c);
    for e in &entries {
        assert_eq!(e.status, Verdict::Pass, "{}: {} {:?}", e.id, e.detail, e.measured);
    }
}

#[test]
fn kokopelli_satisfies_every_lemma() {
    let c = find_center(4, Complex64::new(-0.1565, 1.0323)).unwrap();
    for e in &run(c) {
        assert_eq!(e.status, Verdict::Pass, "{}: {} {:?}", e.id, e.detail, e.measured);
    }
}

#[test]
fn basilica_exempts_renormalization_lemmas() {
    let entries = run(Complex64::new(-1.0, 0.0));
    assert_eq!(status(&entries, "cv_pp"), Verdict::Pass);
    assert_eq!(status(&entries, "subset"), Verdict::Pass);
    for id in ["separation", "zeta", "single_point", "qv", "qn_pullbacks", "non_degenerate_annulus"] {
        assert_eq!(status(&entries, id), Verdict::Exempt, "{id}");
    }
}

#[test]
fn origin_exempts_everything() {
    for e in run(Complex64::new(0.0, 0.0)) {
        assert_eq!(e.status, Verdict::Exempt, "{}", e.id);
    }
}
