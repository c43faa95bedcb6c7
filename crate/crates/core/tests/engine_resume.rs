use colossal::factored::{log_stats, materialize, TopDownForm};
use colossal::oracle::SigmaTable;
use colossal::{generate, CaSequence, CaState, Checkpoint, PrimeSieve};

fn sieve() -> PrimeSieve {
    PrimeSieve::new(1_000_000).unwrap()
}

#[test]
fn resume_from_form_matches_cold_run() {
    let sieve = sieve();
    let cold = CaSequence::generate(&sieve, 2386).unwrap();
    let form = TopDownForm::new(vec![3257, 73, 19, 7, 5, 0, 0, 3, 0, 0, 0, 0, 0, 2]).unwrap();
    assert_eq!(cold.get(508).unwrap().form, form);

    let mut warm = CaState::from_form(508, form, &sieve).unwrap();
    let mut seen = Vec::new();
    generate(&mut warm, 1878, &sieve, |r| {
        seen.push(r.clone());
        Ok(())
    })
    .unwrap();
    assert_eq!(warm.counter(), 2386);
    for r in &seen {
        let c = cold.get(r.index).unwrap();
        assert_eq!((r.q, r.v, &r.form), (c.q, c.v, &c.form));
        assert_eq!((r.g_num, r.g_den), (c.g_num, c.g_den));
        assert!((r.stats.ln_n / c.stats.ln_n - 1.0).abs() < 1e-14);
    }
    assert_eq!(
        seen.last().unwrap().form.to_string(),
        "20359,193,37,13,7,0,5,0,0,3,0,0,0,0,0,0,2"
    );
}

#[test]
fn checkpoint_resume_is_bit_exact() {
    let sieve = sieve();
    let mut straight = CaState::seed(&sieve).unwrap();
    let mut split = CaState::seed(&sieve).unwrap();
    generate(&mut split, 1000, &sieve, |_| Ok(())).unwrap();
    let json = split.checkpoint(&sieve).to_json();
    let mut resumed = Checkpoint::from_json(&json)
        .unwrap()
        .restore(&sieve)
        .unwrap();

    let mut a = Vec::new();
    generate(&mut straight, 3000, &sieve, |r| {
        a.push(r.clone());
        Ok(())
    })
    .unwrap();
    let mut b = Vec::new();
    generate(&mut resumed, 2000, &sieve, |r| {
        b.push(r.clone());
        Ok(())
    })
    .unwrap();
    assert_eq!(&a[1000..], &b[..]);
}

#[test]
fn sigma_and_log_agree_with_oracle_for_materializable_records() {
    let sieve = sieve();
    let table = SigmaTable::build(10_000_000).unwrap();
    let seq = CaSequence::generate(&sieve, 30).unwrap();
    let mut checked = 0;
    for r in seq.records() {
        let Ok(n) = materialize(&r.form, 10_000_000) else {
            break;
        };
        let n = n as u64;
        assert!(
            (r.stats.ln_n - (n as f64).ln()).abs() < 1e-12,
            "ln n_{}",
            r.index
        );
        let rel = r.stats.sigma_minus1() / table.sigma_minus1(n) - 1.0;
        assert!(rel.abs() < 1e-13, "σ₋₁(n_{}) off by {rel:e}", r.index);
        let fresh = log_stats(&r.form, &sieve).unwrap();
        assert!((fresh.ln_sigma_minus1 - r.stats.ln_sigma_minus1).abs() < 1e-13);
        checked += 1;
    }
    assert_eq!(checked, 12);
}
