#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use cliffnet::pencil::{generate, InvariantPencil};

/// Generated instances, cached per test binary.
pub fn instance(seed: u64) -> InvariantPencil {
    static CACHE: OnceLock<Mutex<HashMap<u64, InvariantPencil>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&seed) {
        return p.clone();
    }
    let p = generate(seed, 5).expect("generation succeeds");
    cache.lock().unwrap().insert(seed, p.clone());
    p
}

/// Prints the one-line verdict for an acceptance criterion and fails the test
/// when it does not hold.
pub fn verdict(n: u32, title: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n}: {tag} - {title} ({detail})");
    assert!(ok, "criterion {n} failed: {detail}");
}
