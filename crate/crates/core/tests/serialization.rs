use std::collections::BTreeSet;

use endoscopylab::bounds::{derive_exponent, PacketEntry, PacketModel};
use endoscopylab::cohomology::{poincare_poly, Bipartition, OrderedPartition, PoincarePoly};
use endoscopylab::endoscopy::{bijection, EndoscopicDatum, InnerFormSpec};
use endoscopylab::exact::rational;
use endoscopylab::hyperendoscopy::{expand_stable, AssignedGroup, GroupSymbol};
use endoscopylab::params::{ArthurShape, GroupChar};
use serde_json::{json, Value};

#[test]
fn shape_round_trip() {
    let shape = ArthurShape::from_sl2_dims(&[4, 1, 1]).unwrap();
    let text = serde_json::to_string(&shape).unwrap();
    assert_eq!(serde_json::from_str::<ArthurShape>(&text).unwrap(), shape);
    let value: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["summands"][0], json!({"label": "mu1", "n": 1, "m": 4}));
}

#[test]
fn partition_and_bipartition_round_trip() {
    let p = OrderedPartition::new(vec![2, 1, 1]).unwrap();
    assert_eq!(serde_json::to_value(&p).unwrap(), json!([2, 1, 1]));
    assert_eq!(serde_json::from_value::<OrderedPartition>(json!([2, 1, 1])).unwrap(), p);
    assert!(serde_json::from_value::<OrderedPartition>(json!([2, 0])).is_err());

    let b = Bipartition::new(vec![(2, 2), (1, 0)]).unwrap();
    let back: Bipartition = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
    assert_eq!(back, b);
}

#[test]
fn poincare_round_trip() {
    let poly = poincare_poly(&Bipartition::new(vec![(1, 1), (1, 0)]).unwrap()).unwrap();
    let text = serde_json::to_string(&poly).unwrap();
    assert_eq!(text, r#"{"coeffs":[0,1,0,1]}"#);
    assert_eq!(serde_json::from_str::<PoincarePoly>(&text).unwrap(), poly);
}

#[test]
fn endoscopic_data_round_trip() {
    let shape = ArthurShape::from_sl2_dims(&[2, 1, 1]).unwrap();
    for entry in bijection(&shape).unwrap() {
        let text = serde_json::to_string(&entry).unwrap();
        let back: endoscopylab::endoscopy::BijectionEntry = serde_json::from_str(&text).unwrap();
        assert_eq!(back, entry);
    }
    let d = EndoscopicDatum::new(2, 2).unwrap();
    assert_eq!(serde_json::to_value(d).unwrap()["proper"], json!(true));
}

#[test]
fn inner_form_and_packet_round_trip() {
    let spec = InnerFormSpec {
        signatures: vec![(3, 1), (2, 2)],
        finite_flips: BTreeSet::from([5, 11]),
    };
    let back: InnerFormSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(back, spec);

    let packet = PacketModel::new(
        vec![PacketEntry {
            character: GroupChar::new(2, 3).unwrap(),
            trace: rational(7, 3),
        }],
        GroupChar::new(2, 1).unwrap(),
    )
    .unwrap();
    let value = serde_json::to_value(&packet).unwrap();
    assert_eq!(value["members"][0]["trace"], json!("7/3"));
    assert_eq!(serde_json::from_value::<PacketModel>(value).unwrap(), packet);
}

#[test]
fn expansion_json_lists_terms() {
    let shape = ArthurShape::from_sl2_dims(&[1, 1]).unwrap();
    let value = serde_json::to_value(expand_stable(&AssignedGroup::single(&shape).unwrap())).unwrap();
    let terms = value.as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["group"], json!("U(2)"));
    assert_eq!(terms[0]["coefficient"], json!("1"));
    assert_eq!(terms[1]["group"], json!("U(1)×U(1)"));
    assert_eq!(terms[1]["coefficient"], json!("-1/4"));
    let g: GroupSymbol = serde_json::from_value(json!([1, 3])).unwrap();
    assert_eq!(g.ranks(), &[3, 1]);
}

#[test]
fn derivation_json() {
    let value = serde_json::to_value(derive_exponent(5, 1, 2).unwrap()).unwrap();
    assert_eq!(value["final_exponent"], json!(5));
    let steps = value["steps"].as_array().unwrap();
    assert_eq!(steps.last().unwrap()["value"], json!("5"));
    assert!(steps.iter().all(|s| s["justification"].as_str().is_some_and(|j| !j.is_empty())));
}
