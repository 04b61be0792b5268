use normhol_wasm::{classify_report, tensor_space_report, veronese_report};

#[test]
fn construct_and_classify_round_trip() {
    for (tag, m, g) in [("Type1", 3, 2), ("Type2", 3, 3), ("Type3", 2, 2), ("Type4", 3, 2), ("Type2", 1, 0)] {
        let r = classify_report(tag, m, g).unwrap();
        assert_eq!(r["type"], tag, "{r}");
        assert_eq!(r["recovered"], true);
    }
    assert!(classify_report("Type3", 3, 3).is_err());
    assert!(classify_report("Type4", 2, 2).is_err());
    assert!(classify_report("Type9", 2, 2).is_err());
}

#[test]
fn veronese_angle_matches_twice_the_area() {
    for polar in [0.4, 1.0, 2.2] {
        let r = veronese_report(polar, 256).unwrap();
        let err = r["error"].as_f64().unwrap();
        assert!(err < 1e-5, "{r}");
    }
    assert!(veronese_report(0.0, 10).is_err());
}

#[test]
fn so_n_tensor_spaces() {
    for (n, k) in [(2, 1), (3, 6), (4, 20)] {
        let r = tensor_space_report(n).unwrap();
        assert_eq!(r["dim_K"], k);
        assert_eq!(r["is_weak_berger"], true);
    }
    assert_eq!(tensor_space_report(2).unwrap()["dim_B"], 2);
}
