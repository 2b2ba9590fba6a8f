//! Deterministic synthetic corpora: registries, diaries with known
//! segmentation and identities, and random annotated debates.
//!
//! Everything is driven by a caller-supplied RNG, so a seed reproduces a
//! corpus exactly.

use chrono::{Datelike, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    AnnotatedDebate, Candidate, DebateMeta, Gender, MPRecord, Mandate, Page, Role, SpeakerId,
    SpeakerRef, Utterance,
};
use crate::names::{levenshtein, normalize_name};
use crate::registry::{Registry, RegistryDelta};
use crate::segmenter::RawUtterance;

const MALE_NAMES: &[&str] = &[
    "Alberto", "António", "Armando", "Artur", "Augusto", "Bernardino", "Carlos", "Domingos",
    "Eduardo", "Fernando", "Francisco", "Gonçalo", "Henrique", "Jaime", "Joaquim", "Jorge",
    "José", "Luís", "Manuel", "Mário", "Nuno", "Octávio", "Pedro", "Raul", "Rui", "Sérgio",
    "Vasco", "Vítor", "Zeferino", "Basílio", "Cândido", "Diogo", "Emídio", "Fausto",
];
const FEMALE_NAMES: &[&str] = &[
    "Ana", "Beatriz", "Carolina", "Cecília", "Conceição", "Edite", "Elisa", "Fernanda",
    "Graça", "Helena", "Isabel", "Joana", "Leonor", "Lurdes", "Manuela", "Margarida", "Maria",
    "Natália", "Odete", "Paula", "Rosa", "Teresa", "Virgínia", "Zita", "Amélia", "Branca",
];
const SURNAMES: &[&str] = &[
    "Alves", "Amaral", "Antunes", "Barroso", "Bastos", "Cabral", "Caldeira", "Carvalho",
    "Coelho", "Correia", "Costa", "Cunha", "Dias", "Esteves", "Faria", "Ferreira", "Fonseca",
    "Freitas", "Gaspar", "Gomes", "Guerreiro", "Jardim", "Lacerda", "Lemos", "Lopes",
    "Macedo", "Magalhães", "Marques", "Matos", "Medeiros", "Meneses", "Miranda", "Monteiro",
    "Moura", "Nogueira", "Oliveira", "Pacheco", "Pereira", "Pimentel", "Quintela", "Ramalho",
    "Rebelo", "Ribeiro", "Sampaio", "Seabra", "Serrão", "Simões", "Soares", "Tavares",
    "Teixeira", "Valente", "Vasconcelos", "Veiga", "Vieira", "Xavier", "Zenha", "Brandão",
    "Cordeiro", "Damião", "Espada", "Figueiredo", "Galvão", "Henriques", "Leitão",
];
const PARTIES: &[&str] = &["PS", "PPD", "CDS", "PCP", "UDP", "MDP"];
/// (masculine title, feminine title) of each cabinet post. None is a
/// substring of another.
const CABINETS: &[(&str, &str)] = &[
    ("Ministro da Justiça", "Ministra da Justiça"),
    ("Ministro das Finanças", "Ministra das Finanças"),
    ("Ministro dos Negócios Estrangeiros", "Ministra dos Negócios Estrangeiros"),
    ("Ministro da Agricultura e Pescas", "Ministra da Agricultura e Pescas"),
    ("Ministro da Educação e Cultura", "Ministra da Educação e Cultura"),
    ("Ministro do Trabalho", "Ministra do Trabalho"),
    ("Ministro da Habitação e Obras Públicas", "Ministra da Habitação e Obras Públicas"),
    ("Ministro dos Assuntos Sociais", "Ministra dos Assuntos Sociais"),
    ("Secretário de Estado da Administração Regional", "Secretária de Estado da Administração Regional"),
    ("Secretário de Estado do Comércio Externo", "Secretária de Estado do Comércio Externo"),
];
const MONTHS: &[&str] = &[
    "JANEIRO", "FEVEREIRO", "MARÇO", "ABRIL", "MAIO", "JUNHO", "JULHO", "AGOSTO", "SETEMBRO",
    "OUTUBRO", "NOVEMBRO", "DEZEMBRO",
];
const WORDS: &[&str] = &[
    "a", "o", "de", "da", "do", "que", "e", "em", "para", "com", "não", "uma", "um", "os",
    "as", "por", "mais", "proposta", "lei", "governo", "assembleia", "país", "deputados",
    "questão", "problema", "política", "trabalhadores", "reforma", "agrária", "constituição",
    "república", "votação", "artigo", "projecto", "comissão", "debate", "necessário",
    "importante", "situação", "económica", "povo", "português", "democracia", "liberdade",
    "direito", "partido", "bancada", "orçamento", "regime", "medidas", "sentido", "nosso",
    "nossa", "este", "esta", "sobre", "também", "já", "ainda", "quando", "muito", "todos",
    "apenas", "mesmo", "entre", "sem", "foi", "é", "são", "ser", "há", "pelo", "pela",
    "nacional", "interesse", "decreto", "plenário", "emenda", "texto", "consenso", "Lisboa",
    "Porto", "Estado", "Câmara", "«reforma»", "(sic)", "1976", "50%", "n.º", "§",
];
const PRESIDENT_LINES: &[&str] = &[
    "Tem a palavra o Sr. Deputado.",
    "Srs. Deputados, vamos passar à votação.",
    "Peço aos Srs. Deputados o favor de ocuparem os seus lugares.",
    "Está em discussão o artigo 5.º",
    "Sr. Deputado, o seu tempo esgotou-se.",
    "Vamos votar o requerimento.",
];
const INTERJECTIONS: &[&str] = &[
    "Muito bem!", "Não é verdade!", "Isso é falso!", "Muito bem, muito bem!", "É uma vergonha!",
];

/// A registry of one legislature, with seated members and a government.
#[derive(Debug, Clone)]
pub struct World {
    pub legislature: u32,
    pub sessions: u32,
    pub members: Vec<MPRecord>,
    pub government: Vec<MPRecord>,
}

impl World {
    pub fn registry(&self) -> Registry {
        let mut r = Registry::new();
        r.merge(RegistryDelta {
            records: self.members.iter().chain(&self.government).cloned().collect(),
        })
        .expect("generated registry is consistent");
        r
    }
}

fn too_close(name: &str, taken: &[Vec<char>]) -> bool {
    let n: Vec<char> = normalize_name(name).chars().collect();
    taken.iter().any(|t| levenshtein(&n, t) < 3)
}

/// Builds a registry whose short names are pairwise at least three edits
/// apart after normalization, so one edit never makes a name closer to
/// someone else.
pub fn world<R: Rng>(rng: &mut R, legislature: u32, members: usize, government: usize) -> World {
    let sessions = 4;
    let government = government.min(CABINETS.len());
    let mut taken: Vec<Vec<char>> = Vec::new();
    let mut people = Vec::new();
    let mut next_id = legislature * 10_000 + 1;
    while people.len() < members + government {
        let gender = if rng.gen_bool(0.3) { Gender::Feminine } else { Gender::Masculine };
        let first = *match gender {
            Gender::Feminine => FEMALE_NAMES,
            _ => MALE_NAMES,
        }
        .choose(rng)
        .expect("name lists are non-empty");
        let middle = *SURNAMES.choose(rng).expect("non-empty");
        let last = *SURNAMES.choose(rng).expect("non-empty");
        if middle == last {
            continue;
        }
        let short = format!("{first} {last}");
        if too_close(&short, &taken) {
            continue;
        }
        taken.push(normalize_name(&short).chars().collect());
        people.push(MPRecord {
            speaker_id: SpeakerId::new(next_id.to_string()),
            full_name: format!("{first} {middle} {last}"),
            short_name: short,
            gender,
            mandates: Vec::new(),
        });
        next_id += 1;
    }
    let gov_party = PARTIES[0];
    let mut govs = people.split_off(members);
    for (i, rec) in govs.iter_mut().enumerate() {
        let (m, f) = CABINETS[i];
        rec.mandates.push(Mandate {
            legislature,
            session_from: 1,
            session_to: sessions,
            party: gov_party.to_string(),
            role: Role::Government,
            cabinet: Some(if rec.gender == Gender::Feminine { f } else { m }.to_string()),
        });
    }
    for (i, rec) in people.iter_mut().enumerate() {
        rec.mandates.push(Mandate {
            legislature,
            session_from: 1,
            session_to: sessions,
            party: PARTIES[i % PARTIES.len()].to_string(),
            role: if i < 4 { Role::Secretary } else { Role::Mp },
            cabinet: None,
        });
    }
    World {
        legislature,
        sessions,
        members: people,
        government: govs,
    }
}

/// One utterance as the generator wrote it, with the identity a correct
/// resolver should report.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldUtterance {
    pub order: u32,
    pub page_start: u32,
    pub speaker_string: String,
    pub text: String,
    pub speaker: SpeakerRef,
    /// Whether a single-character edit was applied to the speaker name.
    pub noisy: bool,
}

impl GoldUtterance {
    pub fn raw(&self) -> RawUtterance {
        RawUtterance {
            order: self.order,
            page_start: self.page_start,
            speaker_string: self.speaker_string.clone(),
            text: self.text.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Diary {
    pub meta: DebateMeta,
    pub pages: Vec<Page>,
    pub gold: Vec<GoldUtterance>,
    pub asides: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct DiaryOptions {
    /// Approximate number of utterances.
    pub utterances: usize,
    /// Share of name-bearing speaker strings given a one-character edit.
    pub noise: f64,
    pub lines_per_page: (usize, usize),
}

impl Default for DiaryOptions {
    fn default() -> Self {
        DiaryOptions {
            utterances: 60,
            noise: 0.0,
            lines_per_page: (25, 60),
        }
    }
}

/// Applies one insertion, deletion or substitution to a letter of `name`,
/// producing a different string.
pub fn single_edit<R: Rng>(rng: &mut R, name: &str) -> String {
    const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    let chars: Vec<char> = name.chars().collect();
    let letters: Vec<usize> = (0..chars.len()).filter(|&i| chars[i].is_alphabetic()).collect();
    let &pos = letters.choose(rng).expect("names contain letters");
    let mut out = chars.clone();
    let pick_other = |rng: &mut R, not: char| loop {
        let c = LETTERS[rng.gen_range(0..LETTERS.len())] as char;
        if c != not.to_lowercase().next().unwrap_or(not) {
            break c;
        }
    };
    match rng.gen_range(0..3) {
        0 => {
            let c = pick_other(rng, chars[pos]);
            out.insert(pos + rng.gen_range(0..2), c);
        }
        1 if letters.len() > 1 => {
            out.remove(pos);
        }
        _ => out[pos] = pick_other(rng, chars[pos]),
    }
    out.into_iter().collect()
}

fn sentence<R: Rng>(rng: &mut R, words: usize) -> String {
    let mut s = String::new();
    for i in 0..words {
        let w = *WORDS.choose(rng).expect("non-empty");
        if i > 0 {
            s.push(' ');
        }
        if i == 0 {
            let mut cs = w.chars();
            if let Some(c) = cs.next() {
                s.extend(c.to_uppercase());
                s.push_str(cs.as_str());
            }
        } else {
            s.push_str(w);
        }
    }
    s.push(if rng.gen_bool(0.15) { '?' } else { '.' });
    s
}

/// Wraps text into lines of at most ~`width` characters.
fn wrap(text: &str, width: usize) -> Vec<String> {
    let mut lines = Vec::new();
    let mut cur = String::new();
    for w in text.split(' ') {
        if !cur.is_empty() && cur.chars().count() + 1 + w.chars().count() > width {
            lines.push(std::mem::take(&mut cur));
        }
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(w);
    }
    if !cur.is_empty() {
        lines.push(cur);
    }
    lines
}

fn header_date(d: NaiveDate) -> String {
    format!("{} DE {} DE {}", d.day(), MONTHS[d.month0() as usize], d.year())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    President,
    Member(usize),
    Government(usize),
    Crowd,
    Orador(usize),
}

struct Writer<'w, R: Rng> {
    rng: &'w mut R,
    world: &'w World,
    opts: DiaryOptions,
    lines: Vec<String>,
    /// (index of the speaker line, gold without page)
    gold: Vec<(usize, GoldUtterance)>,
    asides: usize,
}

impl<R: Rng> Writer<'_, R> {
    fn member_ref(&self, rec: &MPRecord, gov: bool) -> SpeakerRef {
        let m = &rec.mandates[0];
        debug_assert_eq!(gov, m.role == Role::Government);
        SpeakerRef::resolved(rec.speaker_id.clone(), rec.short_name.clone(), Some(m.party.clone()))
    }

    fn honorific(g: Gender) -> &'static str {
        match g {
            Gender::Feminine => "A Sr.ª",
            _ => "O Sr.",
        }
    }

    fn noisy_name(&mut self, name: &str) -> (String, bool) {
        if self.opts.noise > 0.0 && self.rng.gen_bool(self.opts.noise) {
            (single_edit(self.rng, name), true)
        } else {
            (name.to_string(), false)
        }
    }

    fn body_text(&mut self, sentences: usize) -> String {
        (0..sentences)
            .map(|_| {
                let n = self.rng.gen_range(3..18);
                sentence(self.rng, n)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn aside(&mut self) -> String {
        let party = *PARTIES.choose(self.rng).expect("non-empty");
        let s = match self.rng.gen_range(0..6) {
            0 => format!("Aplausos do {party}."),
            1 => "Risos.".to_string(),
            2 => format!("(Protestos do {party}.)"),
            3 => "Pausa.".to_string(),
            4 => format!("(Risos do {party}.)"),
            _ => format!("(Aplausos do {party} e do PS.)"),
        };
        self.asides += 1;
        s
    }

    fn utterance(&mut self, speaker_string: String, text: String, speaker: SpeakerRef, noisy: bool) {
        let dash = *["—", "—", "—", "–", "-"].choose(self.rng).expect("non-empty");
        let gap = if self.rng.gen_bool(0.9) { " " } else { "" };
        let mut lines = wrap(&text, self.rng.gen_range(50..90));
        let first = format!("{speaker_string}: {dash}{gap}{}", lines.remove(0));
        let idx = self.lines.len();
        self.lines.push(first);
        for l in lines {
            if self.rng.gen_bool(0.03) {
                let a = self.aside();
                self.lines.push(a);
            }
            self.lines.push(l);
        }
        if self.rng.gen_bool(0.08) {
            let a = self.aside();
            self.lines.push(a);
        }
        self.gold.push((
            idx,
            GoldUtterance {
                order: self.gold.len() as u32 + 1,
                page_start: 0,
                speaker_string,
                text,
                speaker,
                noisy,
            },
        ));
    }

    fn speak(&mut self, kind: Kind) {
        match kind {
            Kind::President => {
                let text = PRESIDENT_LINES.choose(self.rng).expect("non-empty").to_string();
                let form = *["O Sr. Presidente", "O Sr. Presidente", "O Sr. Presidente (em exercício)"]
                    .choose(self.rng)
                    .expect("non-empty");
                self.utterance(form.to_string(), text, SpeakerRef::President, false);
            }
            Kind::Member(i) => {
                let rec = &self.world.members[i];
                let speaker = self.member_ref(rec, false);
                let (gender, short, party, role) = (
                    rec.gender,
                    rec.short_name.clone(),
                    rec.mandates[0].party.clone(),
                    rec.mandates[0].role,
                );
                let (name, noisy) = self.noisy_name(&short);
                let s = if role == Role::Secretary && self.rng.gen_bool(0.5) {
                    let title = if gender == Gender::Feminine { "Secretária" } else { "Secretário" };
                    format!("{} {title} ({name})", Self::honorific(gender))
                } else if self.rng.gen_bool(0.85) {
                    format!("{} {name} ({party})", Self::honorific(gender))
                } else {
                    format!("{} {name}", Self::honorific(gender))
                };
                let n = self.rng.gen_range(1..8);
                let text = self.body_text(n);
                self.utterance(s, text, speaker, noisy);
            }
            Kind::Government(i) => {
                let rec = &self.world.government[i];
                let speaker = self.member_ref(rec, true);
                let cabinet = rec.mandates[0].cabinet.clone().expect("government post");
                let (gender, short) = (rec.gender, rec.short_name.clone());
                let (s, noisy) = if self.rng.gen_bool(0.5) {
                    let (name, noisy) = self.noisy_name(&short);
                    (format!("{} {cabinet} ({name})", Self::honorific(gender)), noisy)
                } else {
                    (format!("{} {cabinet}", Self::honorific(gender)), false)
                };
                let n = self.rng.gen_range(1..8);
                let text = self.body_text(n);
                self.utterance(s, text, speaker, noisy);
            }
            Kind::Crowd => {
                let party = *PARTIES.choose(self.rng).expect("non-empty");
                let who = if self.rng.gen_bool(0.7) {
                    format!("Vozes do {party}")
                } else {
                    format!("Uma voz do {party}")
                };
                let text = INTERJECTIONS.choose(self.rng).expect("non-empty").to_string();
                self.utterance(who, text, SpeakerRef::Unresolved, false);
            }
            Kind::Orador(i) => {
                let rec = &self.world.members[i];
                let speaker = self.member_ref(rec, false);
                let form = if rec.gender == Gender::Feminine { "A Oradora" } else { "O Orador" };
                let n = self.rng.gen_range(1..5);
                let text = self.body_text(n);
                self.utterance(form.to_string(), text, speaker, false);
            }
        }
    }

    /// A member speaks, is interrupted by speakers of the other gender, the
    /// chair or the floor, and resumes as `Orador` one or more times.
    fn interruption(&mut self) {
        let a = self.rng.gen_range(0..self.world.members.len());
        let gender = self.world.members[a].gender;
        let others: Vec<usize> = (0..self.world.members.len())
            .filter(|&j| self.world.members[j].gender != gender)
            .collect();
        self.speak(Kind::Member(a));
        for _ in 0..self.rng.gen_range(1..3) {
            for _ in 0..self.rng.gen_range(1..3) {
                let k = match self.rng.gen_range(0..3) {
                    0 => Kind::President,
                    1 if !others.is_empty() => Kind::Member(*others.choose(self.rng).expect("non-empty")),
                    _ => Kind::Crowd,
                };
                self.speak(k);
            }
            self.speak(Kind::Orador(a));
        }
    }
}

/// Generates a diary in the journal's layout: page headers, a summary ahead
/// of the opening formula, asides, utterances continuing across pages, a
/// closing time line and trailing matter after it.
pub fn diary<R: Rng>(rng: &mut R, world: &World, meta: &DebateMeta, opts: DiaryOptions) -> Diary {
    let mut w = Writer {
        rng,
        world,
        opts,
        lines: Vec::new(),
        gold: Vec::new(),
        asides: 0,
    };
    let president = world.members[0].short_name.clone();
    w.lines.push(format!(
        "REUNIÃO PLENÁRIA DE {}",
        header_date(meta.date - chrono::Duration::days(1))
    ));
    w.lines.push(format!("Presidente: Ex.mo Sr. {president}"));
    w.lines.push("SUMÁRIO".to_string());
    w.lines.push("O Sr. Presidente declarou aberta a sessão às 15 horas e 20 minutos.".to_string());
    w.lines.push("Deu-se conta do expediente e foram aprovados diversos votos.".to_string());
    let opening = *[
        "Srs. Deputados, está aberta a sessão.",
        "Srs. Deputados, temos quórum, pelo que declaro aberta a sessão.",
    ]
    .choose(w.rng)
    .expect("non-empty");
    w.utterance("O Sr. Presidente".into(), opening.to_string(), SpeakerRef::President, false);
    while w.gold.len() < opts.utterances.max(2) {
        let roll = w.rng.gen_range(0..100);
        match roll {
            0..=21 => w.speak(Kind::President),
            22..=71 => {
                let i = w.rng.gen_range(0..world.members.len());
                w.speak(Kind::Member(i));
            }
            72..=81 if !world.government.is_empty() => {
                let i = w.rng.gen_range(0..world.government.len());
                w.speak(Kind::Government(i));
            }
            82..=86 => w.speak(Kind::Crowd),
            _ => w.interruption(),
        }
    }
    let closing = match w.rng.gen_range(0..3) {
        0 => format!("Eram {} horas.", w.rng.gen_range(17..24)),
        1 => format!("Eram {} horas e {} minutos.", w.rng.gen_range(17..24), w.rng.gen_range(2..60)),
        _ => format!("Eram {} horas e 1 minuto.", w.rng.gen_range(17..24)),
    };
    w.lines.push(closing);
    w.lines.push("Entraram durante a sessão os seguintes Srs. Deputados:".to_string());
    for rec in world.members.iter().take(3) {
        w.lines.push(format!("{}.", rec.full_name));
    }
    w.lines.push("O REDACTOR, Manuel Pereira.".to_string());

    // paginate: each page opens with its header block
    let Writer { rng, lines, gold, asides, .. } = w;
    let mut pages: Vec<Page> = Vec::new();
    let mut line_page = Vec::with_capacity(lines.len());
    let mut i = 0;
    while i < lines.len() {
        let number = pages.len() as u32 + 1;
        let take = rng.gen_range(opts.lines_per_page.0..=opts.lines_per_page.1).max(1);
        let mut page_lines = vec![format!("I SÉRIE — NÚMERO {}", meta.number)];
        if number == 1 {
            page_lines.insert(0, "DIÁRIO DA ASSEMBLEIA DA REPÚBLICA".to_string());
            page_lines.push(header_date(meta.date));
        } else {
            page_lines.push(number.to_string());
        }
        page_lines.push(String::new());
        for l in &lines[i..(i + take).min(lines.len())] {
            page_lines.push(l.clone());
            line_page.push(number);
        }
        i += take;
        pages.push(Page {
            number,
            lines: page_lines,
        });
    }
    let gold = gold
        .into_iter()
        .map(|(idx, mut g)| {
            g.page_start = line_page[idx];
            g
        })
        .collect();
    Diary {
        meta: meta.clone(),
        pages,
        gold,
        asides,
    }
}

impl Diary {
    /// Plain text with form feeds between pages.
    pub fn to_paged_text(&self) -> String {
        self.pages
            .iter()
            .map(|p| p.lines.join("\n"))
            .collect::<Vec<_>>()
            .join("\n\x0C")
            + "\n"
    }

    /// HTML with `<!-- page N -->` markers.
    pub fn to_html(&self) -> String {
        let mut out = String::from("<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Diário</title></head><body>\n");
        for p in &self.pages {
            out.push_str(&format!("<!-- page {} -->\n", p.number));
            for l in &p.lines {
                if l.is_empty() {
                    out.push_str("<br>\n");
                } else {
                    out.push_str("<p>");
                    out.push_str(&html_escape::encode_text(l));
                    out.push_str("</p>\n");
                }
            }
        }
        out.push_str("</body></html>\n");
        out
    }

    pub fn gold_raw(&self) -> Vec<RawUtterance> {
        self.gold.iter().map(GoldUtterance::raw).collect()
    }

    /// The annotated debate a correct pipeline produces from this diary.
    pub fn gold_debate(&self) -> AnnotatedDebate {
        AnnotatedDebate::from_utterances(
            self.meta.clone(),
            self.gold
                .iter()
                .map(|g| Utterance {
                    order: g.order,
                    page_start: g.page_start,
                    speaker_string: g.speaker_string.clone(),
                    speaker: g.speaker.clone(),
                    text: g.text.clone(),
                })
                .collect(),
        )
    }
}

/// Debate metadata for the `n`-th sitting of a legislature.
pub fn meta_for(legislature: u32, n: u32) -> DebateMeta {
    let base = NaiveDate::from_ymd_opt(1975 + 4 * legislature as i32, 6, 2).expect("valid date");
    let session = 1 + (n - 1) / 120;
    DebateMeta::r3(legislature, session.min(4), n, base + chrono::Duration::days(n as i64 * 3))
}

fn random_text<R: Rng>(rng: &mut R) -> String {
    const ALPHABET: &[&str] = &[
        "a", "b", "ç", "é", "ã", "Z", " ", " ", "&", "<", ">", "\"", "'", "—", "\t", "\n", "\r",
        "]]>", "&amp;", "€", "𝄞", ":", "1",
    ];
    loop {
        let n = rng.gen_range(1..40);
        let s: String = (0..n).map(|_| *ALPHABET.choose(rng).expect("non-empty")).collect();
        if !s.trim().is_empty() {
            return s;
        }
    }
}

fn random_speaker<R: Rng>(rng: &mut R) -> SpeakerRef {
    let id = |rng: &mut R| SpeakerId::new(rng.gen_range(1..60u32).to_string());
    match rng.gen_range(0..4) {
        0 => SpeakerRef::President,
        1 => SpeakerRef::Unresolved,
        2 => {
            let party = if rng.gen_bool(0.8) { Some(PARTIES.choose(rng).expect("non-empty").to_string()) } else { None };
            SpeakerRef::resolved(id(rng), random_text(rng), party)
        }
        _ => {
            let score = rng.gen_range(0.85..=1.0);
            let n = rng.gen_range(2..5);
            let mut ids: Vec<u32> = (1..60).collect();
            ids.shuffle(rng);
            let candidates = ids[..n]
                .iter()
                .map(|i| Candidate {
                    speaker_id: SpeakerId::new(i.to_string()),
                    score,
                })
                .collect();
            SpeakerRef::ambiguous(candidates).expect("tied candidates")
        }
    }
}

/// A random valid annotated debate with `utterances` utterances spread over
/// increasing pages. Texts include markup characters and control whitespace.
pub fn random_debate<R: Rng>(rng: &mut R, meta: DebateMeta, utterances: usize) -> AnnotatedDebate {
    let mut page = rng.gen_range(1..4u32);
    let us = (0..utterances)
        .map(|i| {
            if i > 0 && rng.gen_bool(0.2) {
                page += rng.gen_range(1..3);
            }
            Utterance {
                order: i as u32 + 1,
                page_start: page,
                speaker_string: random_text(rng),
                speaker: random_speaker(rng),
                text: random_text(rng),
            }
        })
        .collect();
    AnnotatedDebate::from_utterances(meta, us)
}

/// A debate with plain word texts, for statistics.
pub fn counting_debate<R: Rng>(rng: &mut R, meta: DebateMeta, utterances: usize) -> AnnotatedDebate {
    let us = (0..utterances)
        .map(|i| {
            let words = if rng.gen_bool(0.05) { rng.gen_range(200..2000) } else { rng.gen_range(1..60) };
            let sep = |rng: &mut R| *[" ", "  ", "\n", "\t "].choose(rng).expect("non-empty");
            let mut text = String::new();
            for k in 0..words {
                if k > 0 {
                    text.push_str(sep(rng));
                }
                text.push_str(WORDS.choose(rng).expect("non-empty"));
            }
            Utterance {
                order: i as u32 + 1,
                page_start: 1 + i as u32 / 8,
                speaker_string: "O Sr. Presidente".into(),
                speaker: SpeakerRef::President,
                text,
            }
        })
        .collect();
    AnnotatedDebate::from_utterances(meta, us)
}
