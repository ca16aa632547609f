pub mod cli_report;
pub mod exactmath;
pub mod fpgroup;
pub mod orbmodel;
pub mod seifert;
pub mod spin_smale;
pub mod surgery;
