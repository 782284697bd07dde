//! Run the bundled corpus and print one line per entry.

fn main() {
    let rep = jetcalc::corpus::run_dir(&jetcalc::corpus::bundled_dir()).expect("corpus directory");
    for e in &rep.entries {
        println!(
            "{:5} {:28} {:14} {:32} {:?} {} {}",
            if e.ok { "ok" } else { "FAIL" },
            e.file,
            e.bindings.join(","),
            e.name,
            e.kind,
            e.outcome,
            e.detail.clone().unwrap_or_default()
        );
    }
    for (f, err) in &rep.errors {
        println!("ERROR {f}: {err}");
    }
}
