//! Answer extraction from free generations.

/// Finds the first valid answer token in a generation: the earliest
/// occurrence of any valid token as a standalone letter (bounded by
/// non-alphanumeric characters or the text ends). `"B. Like me"` parses
/// to `"B"`; `"Because..."` does not contain a standalone `B`.
pub fn first_valid_token(generation: &str, valid_tokens: &[String]) -> Option<String> {
    let bytes = generation.as_bytes();
    let mut best: Option<(usize, &String)> = None;
    for token in valid_tokens {
        let needle = token.as_bytes();
        if needle.is_empty() {
            continue;
        }
        let mut start = 0;
        while let Some(pos) = find_from(bytes, needle, start) {
            let before_ok = pos == 0 || !bytes[pos - 1].is_ascii_alphanumeric();
            let after = pos + needle.len();
            let after_ok = after >= bytes.len() || !bytes[after].is_ascii_alphanumeric();
            if before_ok && after_ok {
                match best {
                    Some((best_pos, _)) if best_pos <= pos => {}
                    _ => best = Some((pos, token)),
                }
                break;
            }
            start = pos + 1;
        }
    }
    best.map(|(_, t)| t.clone())
}

fn find_from(haystack: &[u8], needle: &[u8], start: usize) -> Option<usize> {
    if start >= haystack.len() {
        return None;
    }
    haystack[start..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + start)
}
