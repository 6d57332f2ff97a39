//! Source-text code metrics: non-blank line count and a token-count
//! cyclomatic complexity estimate for C-family languages.

/// Number of lines containing at least one non-whitespace character.
pub fn count_loc(source: &str) -> u64 {
    source.lines().filter(|l| !l.trim().is_empty()).count() as u64
}

const BRANCH_KEYWORDS: [&str; 5] = ["if", "for", "while", "case", "catch"];

/// Strips comments and string/char literals, keeping line structure.
fn code_only(source: &str) -> String {
    let bytes = source.as_bytes();
    let mut out = String::with_capacity(source.len());
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let next = bytes.get(i + 1).copied();
        match (b, next) {
            (b'/', Some(b'/')) => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            (b'/', Some(b'*')) => {
                i += 2;
                while i < bytes.len() && !(bytes[i] == b'*' && bytes.get(i + 1) == Some(&b'/')) {
                    if bytes[i] == b'\n' {
                        out.push('\n');
                    }
                    i += 1;
                }
                i = (i + 2).min(bytes.len());
                out.push(' ');
            }
            (b'"', _) | (b'\'', _) => {
                let quote = b;
                i += 1;
                while i < bytes.len() && bytes[i] != quote && bytes[i] != b'\n' {
                    if bytes[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i += 1;
                out.push(' ');
            }
            _ => {
                // Push the whole UTF-8 character.
                let ch = source[i..].chars().next().expect("in bounds");
                out.push(ch);
                i += ch.len_utf8();
            }
        }
    }
    out
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn count_ternaries(line: &str) -> usize {
    let chars: Vec<char> = line.chars().collect();
    let mut count = 0;
    for (i, c) in chars.iter().enumerate() {
        if *c != '?' {
            continue;
        }
        let prev = i.checked_sub(1).map(|j| chars[j]);
        let next = chars.get(i + 1).copied();
        if matches!(prev, Some('?')) || matches!(next, Some('?') | Some('.') | Some(':')) {
            continue;
        }
        if chars[i + 1..].contains(&':') {
            count += 1;
        }
    }
    count
}

/// 1 + the number of branch tokens (`if`, `for`, `while`, `case`, `catch`,
/// `&&`, `||`, ternary `?`) outside comments and literals; 0 for empty text.
pub fn estimate_complexity(source: &str) -> u64 {
    if source.trim().is_empty() {
        return 0;
    }
    let code = code_only(source);
    let mut branches = 0usize;
    for word in code.split(|c: char| !is_ident(c)) {
        if BRANCH_KEYWORDS.contains(&word) {
            branches += 1;
        }
    }
    branches += code.matches("&&").count();
    branches += code.matches("||").count();
    branches += code.lines().map(count_ternaries).sum::<usize>();
    1 + branches as u64
}
