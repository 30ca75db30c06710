//! The files in `data/` are generated here. Run with `BKL_REGENERATE=1` to
//! rewrite them; otherwise the committed files must match.

use std::path::PathBuf;

use bkl_core::algebra::{pattern, Element, Gen, Theta};
use bkl_core::bounce::{bianchi_ii, normal_g0};
use bkl_core::constraints::random_rational_germ;
use bkl_core::filtration::basis;
use bkl_core::jet::{origin, Jet};
use bkl_core::mc::ConstraintData;
use bkl_core::scalar::{Scalar, Q};
use rand::SeedableRng;
use serde_json::{json, Value};

const ORDER: usize = 6;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn fixtures() -> Vec<(&'static str, Value)> {
    let b = origin::<Q>();
    let three = Q::from_i64(3);

    let normal = bianchi_ii(three.clone(), &b, ORDER).unwrap();

    let unit = [0, 1, 2].map(|i| [0, 1, 2].map(|k| if i == k { Jet::one(&b, ORDER) } else { Jet::zero(&b, ORDER) }));
    let kasner = ConstraintData::from_frame(unit, normal_g0(&Jet::constant(three, &b, ORDER)).unwrap(), Jet::zero(&b, ORDER)).unwrap();
    let gauge = kasner.sufficient_gauge();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let germ = random_rational_germ(&mut rng, &b, ORDER, 5);

    let one = Jet::one(&b, ORDER);
    let theta1_s23 = Element::from_pattern(&pattern(&[(1, &[1], Gen::S23)]), &one);
    let dt = Element::term(Theta::single(0), Gen::D0, one.clone());
    let boost = Element::term(Theta::single(1), Gen::S1, Jet::variable(0, &b, ORDER));

    let table: Vec<Value> = basis()
        .iter()
        .map(|e| {
            let terms: Vec<Value> =
                e.pattern.iter().map(|((m, g), c)| json!({"coeff": c.render(), "theta": m.indices(), "gen": g.name()})).collect();
            json!({"index": e.index, "alpha": e.alpha.to_string(), "degree": e.degree, "theta0": e.theta0, "terms": terms})
        })
        .collect();

    vec![
        ("d20_complex.json", json!({"dims": [1, 1, 1], "blocks": {"(2,0)": [["1"]]}})),
        ("kasner_u3_normal_form.json", serde_json::to_value(&normal).unwrap()),
        ("kasner_u3_gauge.json", serde_json::to_value(&gauge).unwrap()),
        ("germ_rational.json", serde_json::to_value(&germ).unwrap()),
        ("element_theta1_s23.json", serde_json::to_value(&theta1_s23).unwrap()),
        ("element_theta0_dt.json", serde_json::to_value(&dt).unwrap()),
        ("element_t_theta1_s1.json", serde_json::to_value(&boost).unwrap()),
        ("table_basis.json", Value::Array(table)),
    ]
}

#[test]
fn data_files_match_their_generators() {
    let regenerate = std::env::var_os("BKL_REGENERATE").is_some();
    for (name, value) in fixtures() {
        let path = data_dir().join(name);
        let text = serde_json::to_string_pretty(&value).unwrap() + "\n";
        if regenerate {
            std::fs::write(&path, &text).unwrap();
        } else {
            let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(on_disk, text, "{name} is stale; rerun with BKL_REGENERATE=1");
        }
    }
}
