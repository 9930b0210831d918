/// Placeholder emitted in place of purely numeric tokens.
pub const NUM_TOKEN: &str = "<num>";

/// Lowercases `raw`, splits on every maximal run of non-alphanumeric
/// characters and replaces all-digit tokens with [`NUM_TOKEN`].
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|piece| !piece.is_empty())
        .map(|piece| {
            if piece.chars().all(|c| c.is_numeric()) {
                NUM_TOKEN.to_string()
            } else {
                piece.to_lowercase()
            }
        })
        .collect()
}
