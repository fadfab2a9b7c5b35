use cherry_demo::{lambda_field, map_graph, transition_curve, verdict};

#[test]
fn field_matches_the_curve() {
    let f = lambda_field(1, 1, [1.5, 3.0], [1.5, 3.0], 4, 4).unwrap();
    assert_eq!(f.lambda_u.len(), 16);
    // (2, 2) sits at grid index (1, 1) of a 1.5..3 grid with spacing 0.5.
    let lu = f.lambda_u[4 + 1].unwrap();
    assert!((lu - 1.0).abs() < 1e-12, "{lu}");
    assert!(f.lambda_u[0].unwrap() > 1.0);
    assert!(f.lambda_u[15].unwrap() < 1.0);
    assert!(lambda_field(1, 1, [0.5, 3.0], [1.5, 3.0], 4, 4).is_err());
    assert!(lambda_field(1, 1, [1.5, 3.0], [1.5, 3.0], 1000, 1000).is_err());
}

#[test]
fn curve_is_the_hyperbola() {
    let pts = transition_curve(1, 1, 1.5, 5.0, 7).unwrap();
    assert_eq!(pts.len(), 8);
    for [x, y] in pts {
        assert!((y - (1.0 + 1.0 / (x - 1.0))).abs() < 1e-9, "{x} {y}");
    }
    assert!(transition_curve(1, 1, 1.0, 2.0, 3).is_err());
}

#[test]
fn verdict_is_json() {
    let v: serde_json::Value =
        serde_json::from_str(&verdict("[1,1]rep", "2", "2").unwrap()).unwrap();
    assert_eq!(v["region"], "critical");
    assert!(verdict("golden", "0.5", "2").is_err());
    assert!(verdict("nonsense", "2", "2").is_err());
}

#[test]
fn graph_is_flat_on_the_flat_piece() {
    let g = map_graph("2", "2", "0.015", "0.97", "golden", 6, 200).unwrap();
    assert_eq!(g.returns, [1, 1, 2, 3, 5, 8]);
    assert_eq!(g.xs.len(), 200);
    let on_flat: Vec<f64> =
        g.xs.iter()
            .zip(&g.ys)
            .filter(|(x, _)| **x > 0.02 && **x < 0.98)
            .map(|(_, y)| *y)
            .collect();
    assert!(on_flat.iter().all(|y| (y - g.c).abs() < 1e-15));
    assert!(g.ys.iter().all(|y| (0.0..1.0).contains(y)));
    assert!(map_graph("2", "2", "0.015", "0.97", "golden", 30, 200).is_err());
}
