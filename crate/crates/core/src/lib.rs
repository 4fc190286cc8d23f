//! Video-to-scent planning: the odor schema, visual-timeline and scent-plan
//! IR, clip ingest, model-backed and baseline planners, and the study
//! harness used to collect rankings and ratings of rendered plans.

pub mod demo;
pub mod diff;
pub mod harness;
pub mod ingest;
pub mod io;
pub mod plan;
pub mod planners;
pub mod render;
pub mod schema;
pub mod timeline;
pub mod workspace;

pub use diff::{diff_plans, PlanDiff};
pub use plan::{
    validate_plan, Envelope, ScentEvent, ScentPlan, Strategy, ValidationReport, Violation,
    DEFAULT_MAX_CONCURRENT,
};
pub use render::render_plan_text;
pub use schema::{load_schema, MappingRule, OdorFamily, OdorSchema, SchemaError};
pub use timeline::{ElementCategory, EventKind, Span, TimelineElement, TimelineEvent, VisualTimeline};
pub use workspace::Workspace;
