mod support;

use serde_json::{json, Value};

use appraisal_core::explanation::{realize_appraisal, ChatEndpoint, Realizer, RunLog};
use appraisal_core::{
    Candidate, DimensionId, Engine, EntailmentEndpoint, Error, Query, RankOptions, Selection,
    UserProfile,
};

fn setup() -> (Engine, UserProfile, Query, Vec<Candidate>) {
    let profile = UserProfile {
        user_id: "u".into(),
        goals: vec!["healthy".into()],
        familiar_items: vec!["rice".into()],
        ..UserProfile::default()
    };
    let query = Query::new("a quick healthy dinner in 20 minutes");
    let candidates = vec![Candidate {
        id: "bowl".into(),
        name: "Rice Bowl".into(),
        description: "A healthy, quick rice bowl.".into(),
        prep_time_minutes: 15,
        ingredients: vec!["rice".into(), "egg".into()],
        tags: vec![],
        customization_options: 1,
    }];
    (Engine::default(), profile, query, candidates)
}

fn entailment_body(values: [f64; 6]) -> String {
    // Reverse order on purpose: the client must key by dimension.
    let scores: Vec<Value> = DimensionId::ALL
        .iter()
        .rev()
        .map(|d| json!({"dimension": d.as_str(), "entailment": values[d.index()]}))
        .collect();
    json!({ "scores": scores }).to_string()
}

#[test]
fn entailment_scores_become_normalized_weights() {
    let (engine, profile, query, _) = setup();
    let stub = support::serve(entailment_body([0.1, 0.2, 0.0, 0.9, 0.4, 0.4]), 1);
    let ctx = engine.context(&profile, &query).unwrap();
    let sal = engine
        .salience(&ctx, Some(&EntailmentEndpoint::new(&stub.url)), false, Selection::TopK(3))
        .unwrap();
    assert_eq!(sal.scorer_id, "remote:facebook/bart-large-mnli");
    let w = |d| sal.weight(d);
    assert!((w(DimensionId::Urgency) - 0.9 / 2.0).abs() < 1e-12);
    assert_eq!(
        sal.dominant,
        [DimensionId::Urgency, DimensionId::Agency, DimensionId::NormativeSignificance]
    );

    let request: Value = serde_json::from_str(&stub.requests.lock().unwrap()[0]).unwrap();
    assert_eq!(request["model"], "facebook/bart-large-mnli");
    assert!(request["premise"].as_str().unwrap().contains("quick healthy dinner"));
    let hyps = request["hypotheses"].as_array().unwrap();
    assert_eq!(hyps.len(), 6);
    assert_eq!(hyps[3]["dimension"], "Urgency");
    assert_eq!(
        hyps[3]["text"],
        engine.registry.dimension(DimensionId::Urgency).canonical_statement
    );
}

#[test]
fn malformed_entailment_responses_are_protocol_errors() {
    let (engine, profile, query, _) = setup();
    let ctx = engine.context(&profile, &query).unwrap();
    let out_of_range = entailment_body([0.1, 0.2, 1.5, 0.9, 0.4, 0.4]);
    let unknown = json!({"scores": (0..6).map(|_| json!({"dimension":"Mood","entailment":0.5})).collect::<Vec<_>>()}).to_string();
    for body in [out_of_range, unknown, "not json".to_string(), "{}".to_string()] {
        let stub = support::serve(body.clone(), 1);
        let r = engine.salience(&ctx, Some(&EntailmentEndpoint::new(&stub.url)), true, Selection::TopK(3));
        assert!(matches!(r, Err(Error::ProtocolError(_))), "{body}: {r:?}");
    }
}

#[test]
fn chat_completion_is_returned_verbatim_and_logged() {
    let (engine, profile, query, candidates) = setup();
    let run = engine
        .run(&profile, &query, &candidates, None, false, Selection::TopK(3), RankOptions::default())
        .unwrap();
    let plan = run.plan.unwrap();
    let reply = "  Try the rice bowl.\n";
    let stub = support::serve(
        json!({"choices":[{"message":{"role":"assistant","content": reply}}]}).to_string(),
        1,
    );
    let mut endpoint = ChatEndpoint::new(&stub.url);
    endpoint.model = "local".into();
    let mut log = RunLog::default();
    let r = realize_appraisal(&plan, &run.context, &Realizer::Llm(endpoint), &engine.templates, false, &mut log)
        .unwrap();
    assert_eq!(r.text, reply);
    assert!(!r.fallback);

    let request: Value = serde_json::from_str(&stub.requests.lock().unwrap()[0]).unwrap();
    assert_eq!(request["model"], "local");
    assert_eq!(request["temperature"], 0.0);
    assert_eq!(request["messages"][0]["role"], "system");
    assert!(request["messages"][1]["content"].as_str().unwrap().contains("## Dominant appraisals"));

    let record = &log.records[0];
    assert_eq!(record.realizer, "llm");
    assert_eq!(record.text, reply);
    assert!(record.response.is_some() && record.error.is_none());
}

#[test]
fn unreachable_chat_endpoint_falls_back_only_when_allowed() {
    let (engine, profile, query, candidates) = setup();
    let run = engine
        .run(&profile, &query, &candidates, None, false, Selection::TopK(3), RankOptions::default())
        .unwrap();
    let plan = run.plan.unwrap();
    let realizer = Realizer::Llm(ChatEndpoint::new(support::dead_url()));
    let mut log = RunLog::default();
    let r = realize_appraisal(&plan, &run.context, &realizer, &engine.templates, false, &mut log);
    assert!(matches!(r, Err(Error::RealizerUnavailable(_))));
    let r = realize_appraisal(&plan, &run.context, &realizer, &engine.templates, true, &mut log).unwrap();
    assert!(r.fallback);
    assert_eq!(r.text, appraisal_core::explanation::realize_template(&plan));
}
