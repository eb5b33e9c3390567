//! Tokenizer, closed-class tagger and rule-based lemmatizer for definition text.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cat {
    Det,
    Adj,
    Noun,
    Verb,
    Gerund,
    Prep,
    Conj,
    RelPron,
    Punct,
    Other,
}

impl Cat {
    pub fn is_word(self) -> bool {
        self != Cat::Punct
    }

    /// Categories whose lemmas count as content for definition overlap.
    pub fn is_content(self) -> bool {
        matches!(self, Cat::Adj | Cat::Noun | Cat::Verb | Cat::Gerund)
    }
}

impl fmt::Display for Cat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Cat::Det => "det",
            Cat::Adj => "adj",
            Cat::Noun => "noun",
            Cat::Verb => "verb",
            Cat::Gerund => "gerund",
            Cat::Prep => "prep",
            Cat::Conj => "conj",
            Cat::RelPron => "rel-pron",
            Cat::Punct => "punct",
            Cat::Other => "other",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub cat: Cat,
    /// Character offsets `[start, end)` into the definition.
    pub span: (usize, usize),
}

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "some", "any", "its", "their", "his", "her", "this", "these", "those",
    "each", "every", "another",
];

const PREPOSITIONS: &[&str] = &[
    "of", "with", "for", "to", "in", "on", "at", "from", "by", "into", "onto", "about", "through",
    "over", "under", "between", "without", "within", "along", "across", "near", "during", "around",
    "against", "among", "inside", "outside", "upon",
];

const CONJUNCTIONS: &[&str] = &["and", "or"];

const REL_PRONOUNS: &[&str] = &["that", "which", "who"];

/// Adverbs, abbreviations and other closed words that never head a phrase.
const OTHER_WORDS: &[&str] = &[
    "often",
    "usu.",
    "usually",
    "esp.",
    "especially",
    "very",
    "also",
    "not",
    "sometimes",
    "always",
    "generally",
    "mainly",
    "e.g.",
    "i.e.",
    "sth.",
    "sb.",
    "but",
    "so",
    "as",
];

const ADJECTIVES: &[&str] = &[
    "common",
    "wild",
    "wide",
    "small",
    "large",
    "green",
    "great",
    "former",
    "monetary",
    "tropical",
    "basic",
    "beautiful",
    "hard",
    "equal",
    "close",
    "flat",
    "round",
    "long",
    "short",
    "next",
    "such",
    "young",
    "old",
    "soft",
    "thin",
    "thick",
    "sharp",
    "little",
    "big",
];

/// Verbs that can be tagged without positional evidence.
const CLOSED_VERBS: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "has", "have", "had", "grows", "produces", "lives",
    "makes", "contains", "consists",
];

/// Words ending in -ing that are not gerunds.
const ING_NOUNS: &[&str] = &[
    "thing",
    "something",
    "anything",
    "nothing",
    "everything",
    "string",
    "spring",
    "ring",
    "king",
    "wing",
    "sing",
    "bring",
    "evening",
    "morning",
    "ceiling",
    "during",
    "sling",
    "swing",
];

/// Words ending in -ed that are not participles.
const ED_NOUNS: &[&str] = &[
    "bed", "red", "seed", "need", "shed", "sled", "hundred", "reed", "weed", "feed", "speed",
    "breed", "bleed", "steed", "bred",
];

const ABBREVIATIONS: &[&str] = &["usu.", "etc.", "esp.", "e.g.", "i.e.", "sth.", "sb."];

const SPLIT_PUNCT: &[char] = &['(', ')', ',', ';', ':', '!', '?', '"', '[', ']'];

const IRREGULAR_NOUNS: &[(&str, &str)] = &[
    ("leaves", "leaf"),
    ("men", "man"),
    ("teeth", "tooth"),
    ("feet", "foot"),
    ("geese", "goose"),
    ("mice", "mouse"),
    ("women", "woman"),
    ("children", "child"),
];

const IRREGULAR_VERBS: &[(&str, &str)] = &[
    ("has", "have"),
    ("had", "have"),
    ("is", "be"),
    ("are", "be"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("made", "make"),
    ("grown", "grow"),
];

/// Stems whose final consonant doubles before -ing / -ed.
const DOUBLING_STEMS: &[&str] = &[
    "run", "dig", "cut", "swim", "get", "put", "sit", "hit", "set", "stop", "begin", "plan",
    "drop", "shop", "trap", "wrap", "skip", "ship", "grip", "spin", "win", "chop", "knit", "stir",
];

/// Stems ending in a silent -e, restored after stripping -ing / -ed.
const E_STEMS: &[&str] = &[
    "use", "produce", "shape", "make", "take", "ride", "write", "bake", "shave", "live", "move",
    "dive", "carve", "curve", "close", "cure", "store", "serve", "smoke", "please", "raise",
    "measure", "hope", "change", "come", "give", "have", "dine", "saw",
];

fn in_list(list: &[&str], w: &str) -> bool {
    list.contains(&w)
}

fn is_ellipsis(w: &str) -> bool {
    w.len() >= 2 && w.chars().all(|c| c == '.')
}

/// Splits definition text into tokens and assigns categories and lemmas.
pub fn tokenize(definition: &str) -> Vec<Token> {
    let chars: Vec<char> = definition.chars().collect();
    let mut raw: Vec<(String, usize, usize)> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if SPLIT_PUNCT.contains(&c) {
            raw.push((c.to_string(), i, i + 1));
            i += 1;
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && !SPLIT_PUNCT.contains(&chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            split_trailing_dots(&word, start, &mut raw);
        }
    }

    let mut tokens: Vec<Token> = raw
        .into_iter()
        .map(|(surface, s, e)| Token {
            lemma: String::new(),
            cat: Cat::Other,
            span: (s, e),
            surface,
        })
        .collect();
    tag(&mut tokens);
    for t in &mut tokens {
        t.lemma = lemmatize(&t.surface, t.cat);
    }
    tokens
}

fn split_trailing_dots(word: &str, start: usize, out: &mut Vec<(String, usize, usize)>) {
    let n = word.chars().count();
    let lower = word.to_lowercase();
    if !word.ends_with('.') || is_ellipsis(word) || word == "." || in_list(ABBREVIATIONS, &lower) {
        out.push((word.to_string(), start, start + n));
        return;
    }
    let stem = word.trim_end_matches('.');
    if stem.is_empty() {
        out.push((word.to_string(), start, start + n));
        return;
    }
    let stem_len = stem.chars().count();
    out.push((stem.to_string(), start, start + stem_len));
    out.push((word[stem.len()..].to_string(), start + stem_len, start + n));
}

fn tag(tokens: &mut [Token]) {
    let mut prev_lower: Option<String> = None;
    for i in 0..tokens.len() {
        let surface = &tokens[i].surface;
        let lower = surface.to_lowercase();
        let infinitive = i == 1 && tokens[0].surface.eq_ignore_ascii_case("to");
        let after_rel = prev_lower
            .as_deref()
            .is_some_and(|p| in_list(REL_PRONOUNS, p));
        let cat = if surface.chars().all(|c| !c.is_alphanumeric()) || lower == "etc." {
            Cat::Punct
        } else if in_list(DETERMINERS, &lower) {
            Cat::Det
        } else if in_list(PREPOSITIONS, &lower) {
            Cat::Prep
        } else if in_list(CONJUNCTIONS, &lower) {
            Cat::Conj
        } else if in_list(REL_PRONOUNS, &lower) {
            Cat::RelPron
        } else if in_list(OTHER_WORDS, &lower) {
            Cat::Other
        } else if infinitive || after_rel || in_list(CLOSED_VERBS, &lower) {
            Cat::Verb
        } else if is_gerund_form(&lower) {
            Cat::Gerund
        } else if is_participle_form(&lower) {
            Cat::Verb
        } else if in_list(ADJECTIVES, &lower) {
            Cat::Adj
        } else {
            Cat::Noun
        };
        tokens[i].cat = cat;
        prev_lower = Some(lower);
    }
}

fn is_gerund_form(w: &str) -> bool {
    w.len() > 4 && w.ends_with("ing") && !in_list(ING_NOUNS, w)
}

fn is_participle_form(w: &str) -> bool {
    w.len() >= 4 && w.ends_with("ed") && !w.ends_with("eed") && !in_list(ED_NOUNS, w)
}

fn has_vowel(s: &str) -> bool {
    s.chars()
        .any(|c| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y'))
}

fn singularize(w: &str) -> String {
    if let Some((_, s)) = IRREGULAR_NOUNS.iter().find(|(p, _)| *p == w) {
        return s.to_string();
    }
    let n = w.chars().count();
    if n <= 3 || !w.ends_with('s') {
        return w.to_string();
    }
    if w.ends_with("ss") || w.ends_with("us") || w.ends_with("is") {
        return w.to_string();
    }
    if let Some(stem) = w.strip_suffix("ies") {
        return format!("{stem}y");
    }
    for suffix in ["sses", "xes", "ches", "shes", "zzes"] {
        if w.ends_with(suffix) {
            return w[..w.len() - 2].to_string();
        }
    }
    w[..w.len() - 1].to_string()
}

fn undouble(stem: &str) -> String {
    let chars: Vec<char> = stem.chars().collect();
    if chars.len() >= 2 && chars[chars.len() - 1] == chars[chars.len() - 2] {
        let shorter: String = chars[..chars.len() - 1].iter().collect();
        if in_list(DOUBLING_STEMS, &shorter) {
            return shorter;
        }
    }
    let with_e = format!("{stem}e");
    if in_list(E_STEMS, &with_e) {
        return with_e;
    }
    stem.to_string()
}

fn strip_ing(w: &str) -> String {
    match w.strip_suffix("ing") {
        Some(stem) if stem.chars().count() >= 2 && has_vowel(stem) && !stem.ends_with("ing") => {
            undouble(stem)
        }
        _ => w.to_string(),
    }
}

fn strip_ed(w: &str) -> String {
    if w.ends_with("eed") {
        return w.to_string();
    }
    if let Some(stem) = w.strip_suffix("ied") {
        if !stem.is_empty() {
            return format!("{stem}y");
        }
    }
    match w.strip_suffix("ed") {
        Some(stem) if stem.chars().count() >= 2 && has_vowel(stem) => undouble(stem),
        _ => w.to_string(),
    }
}

fn verb_base(w: &str) -> String {
    if let Some((_, s)) = IRREGULAR_VERBS.iter().find(|(p, _)| *p == w) {
        return s.to_string();
    }
    if w.ends_with("ing") {
        return strip_ing(w);
    }
    if w.ends_with("ed") {
        return strip_ed(w);
    }
    singularize(w)
}

fn lemmatize_once(lower: &str, cat: Cat) -> String {
    match cat {
        Cat::Noun => singularize(lower),
        Cat::Gerund => strip_ing(lower),
        Cat::Verb => verb_base(lower),
        _ => lower.to_string(),
    }
}

/// Reduces an inflected surface form to its lemma.
///
/// A rule result that would itself be rewritten again is rejected in favour of
/// the lowercased surface, which keeps the function idempotent.
pub fn lemmatize(surface: &str, cat: Cat) -> String {
    let lower = surface.to_lowercase();
    let once = lemmatize_once(&lower, cat);
    if once.is_empty() || lemmatize_once(&once, cat) != once {
        lower
    } else {
        once
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn hook_definition_tokens() {
        assert_eq!(
            surfaces("a curved piece of metal, plastic, etc., for catching something"),
            [
                "a",
                "curved",
                "piece",
                "of",
                "metal",
                ",",
                "plastic",
                ",",
                "etc.",
                ",",
                "for",
                "catching",
                "something"
            ]
        );
        let toks = tokenize("a curved piece of metal, plastic, etc., for catching something");
        assert_eq!(toks[8].cat, Cat::Punct);
        assert_eq!(toks[11].cat, Cat::Gerund);
        assert_eq!(toks[11].lemma, "catch");
        assert_eq!(toks[12].cat, Cat::Noun);
    }

    #[test]
    fn trims_and_splits_parens() {
        assert_eq!(surfaces(" x "), ["x"]);
        assert_eq!(surfaces("(something)"), ["(", "something", ")"]);
        let toks = tokenize(" x ");
        assert_eq!(toks[0].span, (1, 2));
    }

    #[test]
    fn abbreviations_and_ellipsis() {
        assert_eq!(
            surfaces("grows usu. in earth, ..."),
            ["grows", "usu.", "in", "earth", ",", "..."]
        );
        assert_eq!(surfaces("baptism ..."), ["baptism", "..."]);
        assert_eq!(surfaces("the end."), ["the", "end", "."]);
    }

    #[test]
    fn spans_increase() {
        let toks =
            tokenize("a living thing that has leaves and roots, and grows usu. in earth, ...");
        for w in toks.windows(2) {
            assert!(w[0].span.1 <= w[1].span.0);
        }
    }

    #[test]
    fn positional_tagging() {
        let toks = tokenize("to fish with a hook and line");
        assert_eq!(toks[1].cat, Cat::Verb);
        assert_eq!(toks[4].cat, Cat::Noun);
        let toks = tokenize("an animal that lives in water");
        assert_eq!(toks[2].cat, Cat::RelPron);
        assert_eq!(toks[3].cat, Cat::Verb);
        assert_eq!(toks[3].lemma, "live");
    }

    #[test]
    fn lemma_examples() {
        assert_eq!(lemmatize("leaves", Cat::Noun), "leaf");
        assert_eq!(lemmatize("catching", Cat::Gerund), "catch");
        assert_eq!(lemmatize("plant", Cat::Noun), "plant");
        assert_eq!(lemmatize("growing", Cat::Gerund), "grow");
        assert_eq!(lemmatize("dried", Cat::Verb), "dry");
        assert_eq!(lemmatize("men", Cat::Noun), "man");
        assert_eq!(lemmatize("running", Cat::Gerund), "run");
        assert_eq!(lemmatize("digging", Cat::Gerund), "dig");
        assert_eq!(lemmatize("cutting", Cat::Gerund), "cut");
        assert_eq!(lemmatize("has", Cat::Verb), "have");
        assert_eq!(lemmatize("produces", Cat::Verb), "produce");
        assert_eq!(lemmatize("used", Cat::Verb), "use");
    }

    #[test]
    fn noun_plural_rules() {
        assert_eq!(lemmatize("berries", Cat::Noun), "berry");
        assert_eq!(lemmatize("boxes", Cat::Noun), "box");
        assert_eq!(lemmatize("churches", Cat::Noun), "church");
        assert_eq!(lemmatize("classes", Cat::Noun), "class");
        assert_eq!(lemmatize("glass", Cat::Noun), "glass");
        assert_eq!(lemmatize("gas", Cat::Noun), "gas");
        assert_eq!(lemmatize("Flowers", Cat::Noun), "flower");
        assert_eq!(lemmatize("bars", Cat::Noun), "bar");
    }

    #[test]
    fn other_categories_only_lowercase() {
        assert_eq!(lemmatize("The", Cat::Det), "the");
        assert_eq!(lemmatize("Leaves", Cat::Other), "leaves");
    }

    #[test]
    fn no_derivational_morphology() {
        // christening stays a headword; only gerund tokens are reduced
        assert_eq!(lemmatize("christening", Cat::Noun), "christening");
    }
}
