use percent_encoding::percent_decode_str;

/// Turns a URL place slug into geocoder query text.
///
/// The slug is percent-decoded first; then every hyphen becomes `", "`.
/// Place names that contain hyphens themselves cannot be expressed.
pub fn parse_place_slug(slug: &str) -> Option<String> {
    let decoded = percent_decode_str(slug).decode_utf8().ok()?;
    if decoded.contains('/') {
        return None;
    }
    let query = decoded.replace('-', ", ");
    let query = query.trim();
    (!query.is_empty()).then(|| query.to_string())
}

/// Cache key for a query: case-folded with whitespace runs collapsed.
pub fn normalize_query(query: &str) -> String {
    query.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}
