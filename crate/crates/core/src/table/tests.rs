use super::*;

fn binary_scheme(attrs: &[&str]) -> Arc<Scheme> {
    Scheme::uniform("S", attrs, &["0", "1"]).unwrap()
}

/// Every table over `scheme`, indexed by bitmask over the row carrier.
fn all_tables(scheme: &Arc<Scheme>) -> Vec<Table> {
    let full: Vec<Row> = Table::full(scheme.clone()).unwrap().rows().cloned().collect();
    (0u32..1 << full.len())
        .map(|m| {
            Table::new(
                scheme.clone(),
                full.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, r)| r.clone()),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn row_carrier_examples() {
    let s = binary_scheme(&["A", "B"]);
    let c = s.row_carrier().unwrap();
    let shown: Vec<String> = c.elements().iter().map(|v| v.to_string()).collect();
    assert_eq!(shown, ["[0,0]", "[0,1]", "[1,0]", "[1,1]"]);

    let empty = Scheme::new("E", vec![]).unwrap();
    let c = empty.row_carrier().unwrap();
    assert_eq!(c.elements(), &[Value::Tuple(vec![])]);

    assert_eq!(binary_scheme(&["A", "B", "C"]).row_carrier().unwrap().len(), 8);
}

#[test]
fn row_carrier_bound_is_enforced() {
    let dom: Vec<String> = (0..100).map(|i| i.to_string()).collect();
    let dom: Vec<&str> = dom.iter().map(String::as_str).collect();
    let s = Scheme::uniform("Big", &["A", "B", "C", "D"], &dom).unwrap();
    assert!(matches!(s.row_carrier(), Err(Error::ResourceExceeded { .. })));
    let small = binary_scheme(&["A", "B", "C"]);
    assert!(small.row_carrier_bounded(7).is_err());
    assert_eq!(small.row_carrier_bounded(8).unwrap().len(), 8);
}

#[test]
fn pid_examples() {
    let s = binary_scheme(&["A", "B"]);
    let c = s.row_carrier().unwrap();
    assert_eq!(pid(&Table::empty(s.clone())).unwrap(), Rel::empty(&c, &c).unwrap());
    assert_eq!(pid(&Table::full(s.clone()).unwrap()).unwrap(), Rel::identity(&c).unwrap());
    let id = Rel::identity(&c).unwrap();
    for t in all_tables(&s) {
        let p = pid(&t).unwrap();
        assert_eq!(p.converse(), p);
        assert!(id.includes(&p).unwrap());
        assert_eq!(p.len(), t.len());
    }
}

#[test]
fn pid_of_intersection_exhaustive() {
    let s = binary_scheme(&["A", "B", "C"]);
    let tables = all_tables(&s);
    assert_eq!(tables.len(), 256);
    let pids: Vec<Rel> = tables.iter().map(|t| pid(t).unwrap()).collect();
    for (i, t1) in tables.iter().enumerate() {
        for (j, t2) in tables.iter().enumerate() {
            let expected = pid(&t1.intersection(t2).unwrap()).unwrap();
            assert_eq!(pids[i].intersect(&pids[j]).unwrap(), expected);
            assert_eq!(pids[i].compose(&pids[j]).unwrap(), expected);
        }
    }
}

#[test]
fn proj_fn_examples() {
    let s = binary_scheme(&["A", "B", "C"]);
    let c = s.row_carrier().unwrap();
    let all = proj_fn(&s, &s.all_attributes()).unwrap();
    assert!(all.is_injective());
    assert_eq!(all.kernel().unwrap(), Rel::identity(&c).unwrap());

    let none = proj_fn(&s, &AttrSet::new()).unwrap();
    assert_eq!(none.kernel().unwrap(), Rel::top(&c, &c).unwrap());

    let x = attr_set(["A"]);
    let y = attr_set(["C", "B"]);
    let xy: AttrSet = x.union(&y).cloned().collect();
    let joined = proj_fn(&s, &x).unwrap().fork(&proj_fn(&s, &y).unwrap()).unwrap();
    assert_eq!(joined.kernel().unwrap(), proj_fn(&s, &xy).unwrap().kernel().unwrap());

    assert!(matches!(proj_fn(&s, &attr_set(["Z"])), Err(Error::UnknownAttribute(_))));
}

#[test]
fn proj_fn_is_order_insensitive_and_applies_restriction() {
    let s = Scheme::new(
        "Flights",
        vec![
            Attribute { name: "Pilot".into(), domain: Carrier::atoms("Pilot", &["p1", "p2"]).unwrap() },
            Attribute { name: "Flight".into(), domain: Carrier::atoms("Flight", &["f1"]).unwrap() },
            Attribute { name: "Date".into(), domain: Carrier::atoms("Date", &["d1", "d2", "d3"]).unwrap() },
        ],
    )
    .unwrap();
    let fd = proj_fn(&s, &attr_set(["Flight", "Date"])).unwrap();
    let df = proj_fn(&s, &attr_set(["Date", "Flight"])).unwrap();
    assert_eq!(fd, df);
    let row = Value::tuple([Value::atom("p2"), Value::atom("f1"), Value::atom("d3")]);
    assert_eq!(fd.apply(&row), Some(&Value::tuple([Value::atom("f1"), Value::atom("d3")])));
    assert_eq!(fd.target().name(), "Flights[Flight,Date]");
}

#[test]
fn proj_fn_total_and_monotone_in_attributes() {
    let s = binary_scheme(&["A", "B", "C"]);
    let names = ["A", "B", "C"];
    let subsets: Vec<AttrSet> = (0u32..8)
        .map(|m| attr_set((0..3).filter(|i| m >> i & 1 == 1).map(|i| names[i])))
        .collect();
    for x in &subsets {
        let px = proj_fn(&s, x).unwrap();
        assert!(px.is_function());
        for y in &subsets {
            let xy: AttrSet = x.union(y).cloned().collect();
            assert!(px.leq(&proj_fn(&s, &xy).unwrap()).unwrap());
        }
    }
}

#[test]
fn encode_pairs_ternary_golden() {
    let s = Scheme::new(
        "T",
        vec![
            Attribute { name: "X".into(), domain: Carrier::atoms("X", &["a", "d"]).unwrap() },
            Attribute { name: "Y".into(), domain: Carrier::atoms("Y", &["b", "e"]).unwrap() },
            Attribute { name: "Z".into(), domain: Carrier::atoms("Z", &["c", "f"]).unwrap() },
        ],
    )
    .unwrap();
    let t = Table::new(s, [Row::atoms(&["a", "b", "c"]), Row::atoms(&["d", "e", "f"])]).unwrap();
    let r = encode_pairs(&t).unwrap();
    let got: Vec<String> = r.pairs().map(|(a, b)| format!("({a},{b})")).collect();
    assert_eq!(got, ["(a,(b,c))", "(d,(e,f))"]);
}

#[test]
fn encode_pairs_binary_and_quaternary() {
    let s = Scheme::uniform("B", &["P", "Q"], &["0", "1"]).unwrap();
    let t = Table::new(s, [Row::atoms(&["0", "1"]), Row::atoms(&["1", "1"])]).unwrap();
    let r = encode_pairs(&t).unwrap();
    assert_eq!(r.target().name(), "Q");
    assert_eq!(r.to_string(), "1 <- 0\n1 <- 1\n");

    let s = Scheme::uniform("Q", &["A", "B", "C", "D"], &["a", "b", "c", "d"]).unwrap();
    let t = Table::new(s, [Row::atoms(&["a", "b", "c", "d"])]).unwrap();
    let r = encode_pairs(&t).unwrap();
    let (x, y) = r.pairs().next().unwrap();
    assert_eq!(x.to_string(), "a");
    assert_eq!(y.to_string(), "(b,(c,d))");

    let unary = Scheme::uniform("U", &["A"], &["0"]).unwrap();
    assert!(matches!(encode_pairs(&Table::empty(unary)), Err(Error::InvalidTable(_))));
}

#[test]
fn encode_pairs_preserves_row_count() {
    let s = binary_scheme(&["A", "B", "C"]);
    for t in all_tables(&s) {
        assert_eq!(encode_pairs(&t).unwrap().len(), t.len());
    }
}

#[test]
fn table_rejects_foreign_values_and_dedups() {
    let s = binary_scheme(&["A", "B"]);
    let t = Table::new(s.clone(), [Row::atoms(&["0", "1"]), Row::atoms(&["0", "1"])]).unwrap();
    assert_eq!(t.len(), 1);
    assert!(Table::new(s.clone(), [Row::atoms(&["0", "7"])]).is_err());
    assert!(Table::new(s, [Row::atoms(&["0"])]).is_err());
}

#[test]
fn csv_active_domains_and_dedup() {
    let text = "Pilot,Flight,Date\np2,f1,d1\np1,f1,d2\np2,f1,d1\n";
    let t = read_csv(text.as_bytes(), "pilots", None).unwrap();
    assert_eq!(t.name(), "pilots");
    assert_eq!(t.len(), 2);
    let dom: Vec<String> = t.scheme().attributes()[0].domain.elements().iter().map(|v| v.to_string()).collect();
    assert_eq!(dom, ["p1", "p2"]);
    let mut out = Vec::new();
    write_csv(&t, &mut out).unwrap();
    let back = read_csv(out.as_slice(), "pilots", None).unwrap();
    assert_eq!(back, t);
}

#[test]
fn csv_quoted_fields() {
    let text = "A,B\n\"x,1\",\"say \"\"hi\"\"\"\n";
    let t = read_csv(text.as_bytes(), "q", None).unwrap();
    let row = t.rows().next().unwrap();
    assert_eq!(row.get(0), &Value::atom("x,1"));
    assert_eq!(row.get(1), &Value::atom("say \"hi\""));
}

#[test]
fn csv_with_schema_reorders_and_declares_domains() {
    let schema = SchemaFile::from_json(
        r#"{"name":"Movies","attributes":[
            {"name":"Title","domain":["t1","t2","t3"]},
            {"name":"Director"},
            {"name":"Actor","domain":["a1","a2"]}]}"#,
    )
    .unwrap();
    let text = "Actor,Title,Director\na1,t1,d1\na2,t2,d2\n";
    let t = read_csv(text.as_bytes(), "ignored", Some(&schema)).unwrap();
    assert_eq!(t.name(), "Movies");
    let names: Vec<&str> = t.scheme().attribute_names().collect();
    assert_eq!(names, ["Title", "Director", "Actor"]);
    assert_eq!(t.scheme().attributes()[0].domain.len(), 3);
    assert!(t.contains(&Row::atoms(&["t1", "d1", "a1"])));
}

#[test]
fn csv_errors_carry_line_numbers() {
    let schema = SchemaFile::from_json(r#"{"name":"T","attributes":[{"name":"A","domain":["0"]}]}"#).unwrap();
    match read_csv("A\n0\n1\n".as_bytes(), "t", Some(&schema)).unwrap_err() {
        Error::Parse { line, .. } => assert_eq!(line, 3),
        e => panic!("unexpected {e}"),
    }
    assert!(matches!(
        read_csv("A,B\n0,1,2\n".as_bytes(), "t", None).unwrap_err(),
        Error::Parse { line: 2, .. }
    ));
    assert!(matches!(read_csv("A,A\n".as_bytes(), "t", None).unwrap_err(), Error::Parse { line: 1, .. }));
}
