//! Built-in named models, embedded as config text.

pub const NAMES: &[&str] = &["pl11", "smoothabs"];

pub fn lookup(name: &str) -> Option<&'static str> {
    match name {
        "pl11" => Some(include_str!("../models/pl11.conf")),
        "smoothabs" => Some(include_str!("../models/smoothabs.conf")),
        _ => None,
    }
}
