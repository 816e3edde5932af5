use std::fs;

use volmoe::numkit::RngStream;
use volmoe::simdata::{export_csv, generate_dataset, import_csv, DatasetConfig, VolatilityClass};
use volmoe::Error;

fn small() -> DatasetConfig {
    DatasetConfig {
        n_companies: 6,
        days: 15,
        ..DatasetConfig::default()
    }
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let cfg = small();
    let ds = generate_dataset(&cfg, 11).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    export_csv(&ds, &path).unwrap();
    let back = import_csv(&path, &cfg, 11).unwrap();
    assert_eq!(back.companies.len(), ds.companies.len());
    for (a, b) in ds.series.iter().zip(&back.series) {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.prices), bits(&b.prices));
    }
    for (a, b) in ds.companies.iter().zip(&back.companies) {
        assert_eq!(a.sigma.to_bits(), b.sigma.to_bits());
        assert_eq!(a.class, b.class);
    }

    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 6 * 15);
    assert_eq!(text.lines().next().unwrap(), "company_id,day,price,sigma,mu,class");
}

#[test]
fn missing_column_reports_the_line() {
    let cfg = small();
    let ds = generate_dataset(&cfg, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    export_csv(&ds, &path).unwrap();
    let mut lines: Vec<String> = fs::read_to_string(&path).unwrap().lines().map(String::from).collect();
    // drop the class column from the fourth data row (line 5 of the file)
    let cut = lines[4].rfind(',').unwrap();
    lines[4].truncate(cut);
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    match import_csv(&path, &cfg, 1) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn unparsable_price_reports_the_line() {
    let cfg = small();
    let ds = generate_dataset(&cfg, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    export_csv(&ds, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let bad = "0,3,abc,0.02,0.05,stable";
    lines[3] = bad;
    fs::write(&path, lines.join("\n")).unwrap();
    match import_csv(&path, &cfg, 1) {
        Err(Error::Parse { line, message }) => {
            assert_eq!(line, 4);
            assert!(message.contains("price"), "{message}");
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn class_that_disagrees_with_threshold_is_rejected() {
    let cfg = small();
    let ds = generate_dataset(&cfg, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    export_csv(&ds, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let (from, to) = match ds.companies[0].class {
        VolatilityClass::Stable => (",stable", ",volatile"),
        VolatilityClass::Volatile => (",volatile", ",stable"),
    };
    let edited: Vec<String> = text
        .lines()
        .map(|l| {
            if l.starts_with("0,") {
                l.replace(from, to)
            } else {
                l.to_string()
            }
        })
        .collect();
    fs::write(&path, edited.join("\n")).unwrap();
    assert!(matches!(import_csv(&path, &cfg, 3), Err(Error::Validation(_))));
}

#[test]
fn mismatched_config_is_rejected() {
    let cfg = small();
    let ds = generate_dataset(&cfg, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    export_csv(&ds, &path).unwrap();
    let wrong = DatasetConfig { days: 20, ..small() };
    assert!(matches!(import_csv(&path, &wrong, 3), Err(Error::Validation(_))));
}

#[test]
fn missing_file_is_an_io_error() {
    let r = import_csv(std::path::Path::new("/nonexistent/d.csv"), &small(), 0);
    assert!(matches!(r, Err(Error::Io { .. })), "{r:?}");
}

#[test]
fn sigma_draws_do_not_depend_on_company_count() {
    let a = generate_dataset(&small(), 5).unwrap();
    let b = generate_dataset(
        &DatasetConfig {
            n_companies: 9,
            ..small()
        },
        5,
    )
    .unwrap();
    for (x, y) in a.companies.iter().zip(&b.companies) {
        assert_eq!(x.sigma.to_bits(), y.sigma.to_bits());
    }
}

#[test]
fn different_master_seeds_give_different_markets() {
    let a = generate_dataset(&small(), 5).unwrap();
    let b = generate_dataset(&small(), 6).unwrap();
    assert_ne!(a.series, b.series);
}

#[test]
fn streams_are_isolated() {
    // a stream's output depends only on (seed, stream id), not on draws elsewhere
    let mut a = RngStream::new(9, 4);
    let first: Vec<u64> = (0..5).map(|_| a.next_u64()).collect();
    let mut other = RngStream::new(9, 3);
    for _ in 0..1000 {
        other.next_u64();
    }
    let mut b = RngStream::new(9, 4);
    let again: Vec<u64> = (0..5).map(|_| b.next_u64()).collect();
    assert_eq!(first, again);
    let mut c = RngStream::new(9, 5);
    assert_ne!(first[0], c.next_u64());
}

#[test]
fn increments_have_drift_mean_and_sigma_spread() {
    let cfg = DatasetConfig {
        n_companies: 50,
        days: 400,
        ..DatasetConfig::default()
    };
    let ds = generate_dataset(&cfg, 77).unwrap();
    let z: Vec<f64> = ds
        .companies
        .iter()
        .zip(&ds.series)
        .flat_map(|(c, s)| s.prices.windows(2).map(move |w| (w[1] - w[0] - c.mu) / c.sigma))
        .collect();
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let sd = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!(mean.abs() < 4.0 / n.sqrt(), "mean {mean}");
    assert!((sd - 1.0).abs() < 4.0 / (2.0 * n).sqrt(), "sd {sd}");
}
