//! The nine acceptance criteria, one line each.

use pbh_scenarios::acceptance;

#[test]
fn acceptance() {
    let results = acceptance::run_all();
    for c in &results {
        println!("{c}");
    }
    let failed: Vec<u8> = results.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
