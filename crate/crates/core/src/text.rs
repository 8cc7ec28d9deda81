// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! String normalization shared by every equality test in the crate.

/// Lowercases a single character, keeping it unchanged when the lowercase
/// mapping expands to more than one character (so offsets stay aligned).
pub fn fold_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Trims ASCII whitespace and case-folds.
///
/// This is the only notion of equality used when comparing substitutes,
/// gold annotations and targets.
pub fn normalize(s: &str) -> String {
    s.trim_matches(|c: char| c.is_ascii_whitespace())
        .chars()
        .map(fold_char)
        .collect()
}

/// True when every character is alphabetic and the string is non-empty.
pub fn is_alphabetic_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(char::is_alphabetic)
}

/// Uppercases the first character of `s`.
pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn starts_uppercase(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}
