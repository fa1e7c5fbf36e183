//! Snowball stemmer for Spanish.
//!
//! Follows the published Snowball algorithm: regions RV/R1/R2, attached
//! pronoun removal, standard suffixes, `y`-verb and other verb suffixes,
//! residual suffixes, then acute accents are stripped.

const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u', 'á', 'é', 'í', 'ó', 'ú', 'ü'];

fn is_vowel(c: char) -> bool {
    VOWELS.contains(&c)
}

struct Word {
    chars: Vec<char>,
    rv: usize,
    r1: usize,
    r2: usize,
}

impl Word {
    fn new(word: &str) -> Self {
        let chars: Vec<char> = word.chars().collect();
        let (rv, r1, r2) = regions(&chars);
        Word { chars, rv, r1, r2 }
    }

    fn len(&self) -> usize {
        self.chars.len()
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        n <= self.len() && self.chars[self.len() - n..].iter().copied().eq(suffix.chars())
    }

    /// The longest suffix from `list` the word ends with, as (suffix, start).
    fn longest<'a>(&self, list: &[&'a str]) -> Option<(&'a str, usize)> {
        list.iter()
            .copied()
            .filter(|s| self.ends_with(s))
            .max_by_key(|s| s.chars().count())
            .map(|s| (s, self.len() - s.chars().count()))
    }

    /// Longest suffix from `list` ending at `end`.
    fn longest_before<'a>(&self, end: usize, list: &[&'a str]) -> Option<(&'a str, usize)> {
        list.iter()
            .copied()
            .filter(|s| {
                let n = s.chars().count();
                n <= end && self.chars[end - n..end].iter().copied().eq(s.chars())
            })
            .max_by_key(|s| s.chars().count())
            .map(|s| (s, end - s.chars().count()))
    }

    fn truncate(&mut self, at: usize) {
        self.chars.truncate(at);
    }

    fn replace_tail(&mut self, start: usize, with: &str) {
        self.chars.truncate(start);
        self.chars.extend(with.chars());
    }

    fn char_at(&self, i: usize) -> Option<char> {
        self.chars.get(i).copied()
    }
}

/// Returns (RV, R1, R2) start offsets.
fn regions(w: &[char]) -> (usize, usize, usize) {
    let n = w.len();
    let gopast = |from: usize, want_vowel: bool| -> Option<usize> {
        (from..n).find(|&i| is_vowel(w[i]) == want_vowel).map(|i| i + 1)
    };

    let rv = if n < 2 {
        n
    } else if is_vowel(w[0]) {
        if !is_vowel(w[1]) {
            gopast(2, true).unwrap_or(n)
        } else {
            gopast(2, false).unwrap_or(n)
        }
    } else if !is_vowel(w[1]) {
        gopast(2, true).unwrap_or(n)
    } else {
        3.min(n)
    };

    let after_vc = |from: usize| -> usize {
        gopast(from, true)
            .and_then(|i| gopast(i, false))
            .unwrap_or(n)
    };
    let r1 = after_vc(0);
    let r2 = if r1 < n { after_vc(r1) } else { n };
    (rv, r1, r2)
}

const PRONOUNS: &[&str] = &[
    "me", "se", "sela", "selo", "selas", "selos", "la", "le", "lo", "las", "les", "los", "nos",
];

const PRONOUN_HOSTS: &[&str] = &[
    "iéndo", "ándo", "ár", "ér", "ír", "ando", "iendo", "ar", "er", "ir", "yendo",
];

fn attached_pronoun(w: &mut Word) {
    let Some((_, p_start)) = w.longest(PRONOUNS) else {
        return;
    };
    let Some((host, h_start)) = w.longest_before(p_start, PRONOUN_HOSTS) else {
        return;
    };
    if h_start < w.rv {
        return;
    }
    match host {
        "iéndo" => w.replace_tail(h_start, "iendo"),
        "ándo" => w.replace_tail(h_start, "ando"),
        "ár" => w.replace_tail(h_start, "ar"),
        "ér" => w.replace_tail(h_start, "er"),
        "ír" => w.replace_tail(h_start, "ir"),
        "yendo" => {
            if h_start > 0 && w.char_at(h_start - 1) == Some('u') {
                w.truncate(p_start);
            }
        }
        _ => w.truncate(p_start),
    }
}

const STANDARD: &[&str] = &[
    "anza", "anzas", "ico", "ica", "icos", "icas", "ismo", "ismos", "able", "ables", "ible",
    "ibles", "ista", "istas", "oso", "osa", "osos", "osas", "amiento", "amientos", "imiento",
    "imientos", "adora", "ador", "ación", "adoras", "adores", "aciones", "ante", "antes", "ancia",
    "ancias", "logía", "logías", "ución", "uciones", "encia", "encias", "amente", "mente", "idad",
    "idades", "iva", "ivo", "ivas", "ivos",
];

fn standard_suffix(w: &mut Word) -> bool {
    let Some((suffix, start)) = w.longest(STANDARD) else {
        return false;
    };
    let in_r2 = |w: &Word, at: usize| at >= w.r2;
    match suffix {
        "anza" | "anzas" | "ico" | "ica" | "icos" | "icas" | "ismo" | "ismos" | "able"
        | "ables" | "ible" | "ibles" | "ista" | "istas" | "oso" | "osa" | "osos" | "osas"
        | "amiento" | "amientos" | "imiento" | "imientos" => {
            if !in_r2(w, start) {
                return false;
            }
            w.truncate(start);
        }
        "adora" | "ador" | "ación" | "adoras" | "adores" | "aciones" | "ante" | "antes"
        | "ancia" | "ancias" => {
            if !in_r2(w, start) {
                return false;
            }
            w.truncate(start);
            if w.ends_with("ic") && in_r2(w, w.len() - 2) {
                let at = w.len() - 2;
                w.truncate(at);
            }
        }
        "logía" | "logías" => {
            if !in_r2(w, start) {
                return false;
            }
            w.replace_tail(start, "log");
        }
        "ución" | "uciones" => {
            if !in_r2(w, start) {
                return false;
            }
            w.replace_tail(start, "u");
        }
        "encia" | "encias" => {
            if !in_r2(w, start) {
                return false;
            }
            w.replace_tail(start, "ente");
        }
        "amente" => {
            if start < w.r1 {
                return false;
            }
            w.truncate(start);
            if let Some((next, at)) = w.longest(&["iv", "os", "ic", "ad"]) {
                if in_r2(w, at) {
                    w.truncate(at);
                    if next == "iv" && w.ends_with("at") && in_r2(w, w.len() - 2) {
                        let at = w.len() - 2;
                        w.truncate(at);
                    }
                }
            }
        }
        "mente" => {
            if !in_r2(w, start) {
                return false;
            }
            w.truncate(start);
            if let Some((_, at)) = w.longest(&["ante", "able", "ible"]) {
                if in_r2(w, at) {
                    w.truncate(at);
                }
            }
        }
        "idad" | "idades" => {
            if !in_r2(w, start) {
                return false;
            }
            w.truncate(start);
            if let Some((_, at)) = w.longest(&["abil", "ic", "iv"]) {
                if in_r2(w, at) {
                    w.truncate(at);
                }
            }
        }
        "iva" | "ivo" | "ivas" | "ivos" => {
            if !in_r2(w, start) {
                return false;
            }
            w.truncate(start);
            if w.ends_with("at") && in_r2(w, w.len() - 2) {
                let at = w.len() - 2;
                w.truncate(at);
            }
        }
        _ => unreachable!("suffix list and match arms disagree"),
    }
    true
}

const Y_VERB: &[&str] = &[
    "ya", "ye", "yan", "yen", "yeron", "yendo", "yo", "yó", "yas", "yes", "yais", "yamos",
];

fn y_verb_suffix(w: &mut Word) -> bool {
    let Some((_, start)) = w.longest_in_rv(Y_VERB) else {
        return false;
    };
    if start == 0 || w.char_at(start - 1) != Some('u') {
        return false;
    }
    w.truncate(start);
    true
}

const VERB: &[&str] = &[
    "en", "es", "éis", "emos", "arían", "arías", "arán", "arás", "aríais", "aría", "aréis",
    "aríamos", "aremos", "ará", "aré", "erían", "erías", "erán", "erás", "eríais", "ería", "eréis",
    "eríamos", "eremos", "erá", "eré", "irían", "irías", "irán", "irás", "iríais", "iría", "iréis",
    "iríamos", "iremos", "irá", "iré", "aba", "ada", "ida", "ía", "ara", "iera", "ad", "ed", "id",
    "ase", "iese", "aste", "iste", "an", "aban", "ían", "aran", "ieran", "asen", "iesen", "aron",
    "ieron", "ado", "ido", "ando", "iendo", "ió", "ar", "er", "ir", "as", "abas", "adas", "idas",
    "ías", "aras", "ieras", "ases", "ieses", "ís", "áis", "abais", "íais", "arais", "ierais",
    "aseis", "ieseis", "asteis", "isteis", "ados", "idos", "amos", "ábamos", "íamos", "imos",
    "áramos", "iéramos", "iésemos", "ásemos",
];

fn verb_suffix(w: &mut Word) -> bool {
    let Some((suffix, mut start)) = w.longest_in_rv(VERB) else {
        return false;
    };
    if matches!(suffix, "en" | "es" | "éis" | "emos")
        && start >= 2
        && w.char_at(start - 1) == Some('u')
        && w.char_at(start - 2) == Some('g')
    {
        start -= 1;
    }
    w.truncate(start);
    true
}

fn residual_suffix(w: &mut Word) {
    let Some((suffix, start)) = w.longest(&["os", "a", "o", "á", "í", "ó", "e", "é"]) else {
        return;
    };
    if start < w.rv {
        return;
    }
    w.truncate(start);
    if matches!(suffix, "e" | "é")
        && start >= 2
        && w.char_at(start - 1) == Some('u')
        && w.char_at(start - 2) == Some('g')
        && start > w.rv
    {
        w.truncate(start - 1);
    }
}

impl Word {
    /// Longest suffix from `list` lying entirely inside RV.
    fn longest_in_rv<'a>(&self, list: &[&'a str]) -> Option<(&'a str, usize)> {
        let rv = self.rv;
        list.iter()
            .copied()
            .filter(|s| {
                let n = s.chars().count();
                self.len() >= rv + n && self.ends_with(s)
            })
            .max_by_key(|s| s.chars().count())
            .map(|s| (s, self.len() - s.chars().count()))
    }
}

fn strip_acute(c: char) -> char {
    match c {
        'á' => 'a',
        'é' => 'e',
        'í' => 'i',
        'ó' => 'o',
        'ú' => 'u',
        other => other,
    }
}

/// Stems one lowercase Spanish word.
pub fn stem_word(word: &str) -> String {
    let mut w = Word::new(word);
    attached_pronoun(&mut w);
    // regions are fixed by the original word
    let _ = standard_suffix(&mut w) || y_verb_suffix(&mut w) || verb_suffix(&mut w);
    residual_suffix(&mut w);
    w.chars.into_iter().map(strip_acute).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_figure_words() {
        let cases = [
            ("pesimo", "pesim"),
            ("auto", "aut"),
            ("falan", "fal"),
            ("frenos", "fren"),
            ("sistema", "sistem"),
            ("entretenimiento", "entreten"),
            ("compren", "compr"),
            ("y", "y"),
            ("de", "de"),
            ("lo", "lo"),
            ("user", "user"),
        ];
        for (word, expected) in cases {
            assert_eq!(stem_word(word), expected, "{word}");
        }
    }

    #[test]
    fn regions_follow_definition() {
        let chars: Vec<char> = "beautiful".chars().collect();
        let (_, r1, r2) = regions(&chars);
        assert_eq!(&chars[r1..].iter().collect::<String>(), "iful");
        assert_eq!(&chars[r2..].iter().collect::<String>(), "ul");
        // consonant then vowel: RV starts after the third letter
        let chars: Vec<char> = "macho".chars().collect();
        assert_eq!(regions(&chars).0, 3);
        let chars: Vec<char> = "oliva".chars().collect();
        assert_eq!(regions(&chars).0, 3);
        let chars: Vec<char> = "trabajo".chars().collect();
        assert_eq!(regions(&chars).0, 3);
        let chars: Vec<char> = "aureo".chars().collect();
        assert_eq!(regions(&chars).0, 3);
    }

    #[test]
    fn short_and_empty_words() {
        assert_eq!(stem_word(""), "");
        assert_eq!(stem_word("a"), "a");
        assert_eq!(stem_word(";"), ";");
    }
}
