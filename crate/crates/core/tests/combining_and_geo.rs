use sxacml::functions::{geo_distance, geo_within_distance, time_within_window};
use sxacml::ontology::GeoPoint;
use sxacml::policy::{combine, CombiningAlgorithm, Decision, DecisionValue};
use sxacml_oracle::{combining, haversine_m};

fn lists(max_len: usize) -> Vec<Vec<DecisionValue>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|l: &Vec<DecisionValue>| {
                DecisionValue::ALL.into_iter().map(move |d| {
                    let mut next = l.clone();
                    next.push(d);
                    next
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

#[test]
fn combine_matches_truth_tables_exhaustively() {
    let all = lists(4);
    assert_eq!(all.len(), 1 + 4 + 16 + 64 + 256);
    for list in &all {
        let names: Vec<&str> = list.iter().map(|d| d.name()).collect();
        let decisions: Vec<Decision> = list.iter().map(|&d| Decision::from(d)).collect();
        for (algorithm, reference) in [
            (
                CombiningAlgorithm::DenyOverrides,
                combining::deny_overrides as fn(&[&str]) -> &'static str,
            ),
            (CombiningAlgorithm::PermitOverrides, combining::permit_overrides),
            (CombiningAlgorithm::FirstApplicable, combining::first_applicable),
        ] {
            assert_eq!(
                combine(algorithm, &decisions).value().name(),
                reference(&names),
                "{algorithm} {names:?}"
            );
        }
    }
}

fn p(lat: f64, lon: f64) -> GeoPoint {
    GeoPoint::new(lat, lon).unwrap()
}

#[test]
fn one_degree_separations() {
    // 2πR/360 for R = 6 371 000 m
    let closed_form = 2.0 * std::f64::consts::PI * 6_371_000.0 / 360.0;
    assert!((closed_form - 111_194.93).abs() < 0.01);
    let equatorial = geo_distance(&p(0.0, 0.0), &p(0.0, 1.0));
    let meridional = geo_distance(&p(0.0, 0.0), &p(1.0, 0.0));
    assert!((equatorial - closed_form).abs() < 1.0, "{equatorial}");
    assert!((meridional - closed_form).abs() < 1.0, "{meridional}");
    assert!(geo_distance(&p(52.2297, 21.0122), &p(52.2297, 21.0122)).abs() < 1e-6);
}

#[test]
fn distance_agrees_with_reference() {
    let points = [
        (52.2297, 21.0122),
        (52.2342, 21.0122),
        (-33.9, 151.2),
        (89.9, -179.9),
        (0.0, 180.0),
    ];
    for a in points {
        for b in points {
            let got = geo_distance(&p(a.0, a.1), &p(b.0, b.1));
            assert!((got - haversine_m(a, b)).abs() < 1e-6, "{a:?} {b:?}");
        }
    }
    assert!(geo_within_distance(&p(52.2297, 21.0122), &p(52.2342, 21.0122), 1000.0).unwrap());
    assert!(geo_within_distance(&p(0.0, 0.0), &p(0.0, 0.0), -1.0).is_err());
}

#[test]
fn window_is_inclusive() {
    use chrono::{Duration, TimeZone, Utc};
    let t = Utc.with_ymd_and_hms(2019, 6, 14, 23, 0, 0).unwrap();
    let hour = 3_600_000;
    assert!(time_within_window(&(t + Duration::hours(1)), &t, hour).unwrap());
    assert!(!time_within_window(&(t + Duration::milliseconds(3_600_001)), &t, hour).unwrap());
}
