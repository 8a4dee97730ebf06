use taxicab_core::cachefile::{self, Expected};
use taxicab_core::{
    count_row, Budget, Certification, CountMode, CountTable, Error, SearchTable, Solver, Status,
    TailCertificate, TailKind,
};

#[test]
fn increment_certificates_predict_later_columns() {
    let s = Solver::default();
    let mut issued = 0;
    for m in 2..=6u64 {
        for j0 in 5..=12u64 {
            let Some(n0) = s.taxicab(2, j0, m, 20_000).unwrap().status.found() else {
                continue;
            };
            let Certification::Issued(cert) = s.certify_tail_increment(2, j0, m, n0).unwrap() else {
                continue;
            };
            assert!(cert.is_consistent());
            for delta in 1..=3 {
                let next = s.taxicab(2, j0 + delta, m, 20_000).unwrap();
                assert_eq!(next.status, Status::Found(n0 + delta), "m={m} j0={j0} delta={delta}");
            }
            issued += 1;
        }
    }
    assert!(issued > 10, "only {issued} certificates issued");
}

#[test]
fn nonexistence_certificates_hold_beyond_their_last_column() {
    let s = Solver::default();
    let cert = s.certify_tail_nonexistence(3, 10).unwrap();
    let Some(TailCertificate { kind: TailKind::Nonexistence { j_final, .. }, .. }) = cert.certificate().cloned() else {
        panic!("no certificate: {cert:?}");
    };
    for j in [j_final + 1, j_final + 2] {
        let out = s.decide_squares(j, 3).unwrap();
        assert!(matches!(out.status, Status::ProvedAbsent { .. }), "j={j}: {out}");
    }
    assert!(s.certify_tail_nonexistence(3, 13).unwrap().certificate().is_some());
}

#[test]
fn certificates_survive_text_and_a_fresh_audit() {
    let s = Solver::default();
    for cert in [
        s.certify_tail_nonexistence(3, 10).unwrap(),
        s.certify_tail_increment(2, 7, 2, 22).unwrap(),
    ] {
        let cert = cert.certificate().expect("issued").clone();
        let parsed = TailCertificate::parse_text(&cert.to_text()).unwrap();
        assert_eq!(parsed, cert);
        let checks = Solver::default().audit_certificate(&parsed).unwrap();
        assert!(checks.iter().all(|c| c.holds()), "{checks:?}");
    }
}

#[test]
fn wrong_increment_claims_are_rejected() {
    let s = Solver::default();
    assert!(matches!(s.certify_tail_increment(2, 7, 2, 23), Err(Error::Certification(_))));
}

#[test]
fn count_tables_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("squares.txcb");
    let table: CountTable<u64> = count_row(2, 6, 1000, CountMode::Exact, &Budget::default()).unwrap();
    cachefile::store(&path, &table).unwrap();
    let expected = Expected { k: 2, mode: CountMode::Exact };
    let back: CountTable<u64> = cachefile::load(&path, Some(expected)).unwrap();
    assert_eq!(back, table);

    let wrong_k = Expected { k: 3, mode: CountMode::Exact };
    assert!(matches!(cachefile::load::<u64>(&path, Some(wrong_k)), Err(Error::Cache(_))));

    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 3);
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(cachefile::load::<u64>(&path, None), Err(Error::Cache(_))));
}

#[test]
fn search_tables_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let table = SearchTable::build(2, 8, 5000, 40, &Budget::default()).unwrap();
    let path = dir.path().join(cachefile::search_file_name(2, 40));
    cachefile::store_search(&path, &table).unwrap();
    let back = cachefile::load_search(&path, Some(Expected { k: 2, mode: CountMode::Saturating { cap: 40 } })).unwrap();
    for j in 0..=8 {
        for n in 0..=5000 {
            assert_eq!(back.cell(n, j), table.cell(n, j));
        }
    }
    let other_cap = Expected { k: 2, mode: CountMode::Saturating { cap: 41 } };
    assert!(cachefile::load_search(&path, Some(other_cap)).is_err());
}
