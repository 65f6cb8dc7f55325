use stein_core::io::{parse_st2, parse_steinberg, st2_to_value, steinberg_to_value};
use stein_core::mpl::{identity_to_json, parse_identity, verify_li_identity, WEIGHT_FOUR_IDENTITY};
use stein_core::qlinalg::qvec;
use stein_core::st2::{embed_s, make_l, s_inverse};
use stein_core::steinberg::{ash_rudolph_reduce, normal_form};

#[test]
fn steinberg_json_through_reduction() {
    let x = parse_steinberg(r#"[{"coeff": "3/2", "apartment": [[2, 7], [1, 5]]}]"#).unwrap();
    let y = ash_rudolph_reduce(&x).unwrap();
    let back = parse_steinberg(&steinberg_to_value(&y).to_string()).unwrap();
    assert_eq!(normal_form(&back), normal_form(&x));
}

#[test]
fn st2_json_through_bar_complex() {
    let l = make_l(&[qvec(&[1, 2, 0]), qvec(&[0, 1, 1]), qvec(&[1, 0, 3])]).unwrap();
    let parsed = parse_st2(&st2_to_value(&l).to_string()).unwrap();
    let again = s_inverse(&embed_s(&parsed)).unwrap();
    assert!(again.sub(&l).is_zero());
}

#[test]
fn identity_file_survives_serialization() {
    let (d, terms) = parse_identity(WEIGHT_FOUR_IDENTITY).unwrap();
    let (d2, back) = parse_identity(&identity_to_json(&terms)).unwrap();
    assert_eq!(d, d2);
    assert!(verify_li_identity(d2, &back, None).unwrap().st_infty_zero);
}
