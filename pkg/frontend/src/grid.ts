/**
 * Probability grid: one row per guideline example, one column per template
 * of the selected role.
 *
 * Cell bands mirror the pipeline's decision semantics:
 *   entailed  (green)  — scored and p_entail >= threshold
 *   allowed   (yellow) — scored, but below the threshold
 *   excluded  (grey)   — the role/template was never scored for this
 *                        example (type constraints or template scope)
 *
 * Values are copied verbatim from service responses; nothing is computed
 * client-side beyond the band comparison against the service-reported
 * threshold.
 */

import type {
  ExampleCandidate,
  HypothesisRow,
  Prediction,
  ServiceApi,
  TemplateRecord,
} from "./api.js";

export type Band = "entailed" | "allowed" | "excluded";

export interface GridCell {
  templateId: string;
  hypothesis: string | null;
  entail: number | null;
  neutral: number | null;
  contradict: number | null;
  band: Band;
}

export interface GridRow {
  example: ExampleCandidate;
  prediction: Prediction;
  cells: GridCell[];
}

export function buildGridRow(
  role: string,
  example: ExampleCandidate,
  templates: TemplateRecord[],
  prediction: Prediction,
  hypotheses: HypothesisRow[],
): GridRow {
  const textByTemplate = new Map<string, string>();
  for (const row of hypotheses) {
    if (row.role === role) textByTemplate.set(row.template_id, row.hypothesis);
  }
  const scoreByTemplate = new Map<string, { entail: number; neutral: number; contradict: number }>();
  for (const score of prediction.scores) {
    if (score.role === role) scoreByTemplate.set(score.template, score);
  }
  const cells = templates.map((template): GridCell => {
    const score = scoreByTemplate.get(template.id);
    if (!score) {
      return {
        templateId: template.id,
        hypothesis: textByTemplate.get(template.id) ?? null,
        entail: null,
        neutral: null,
        contradict: null,
        band: "excluded",
      };
    }
    return {
      templateId: template.id,
      hypothesis: textByTemplate.get(template.id) ?? null,
      entail: score.entail,
      neutral: score.neutral,
      contradict: score.contradict,
      band: score.entail >= prediction.threshold ? "entailed" : "allowed",
    };
  });
  return { example, prediction, cells };
}

/**
 * Score every example for one role's saved templates.
 *
 * The prediction request runs without a roles override so the service
 * applies its type constraints (that is what makes grey rows grey); the
 * verbalize request overrides to the selected role purely to fetch
 * hypothesis text for display, excluded cells included.
 */
export async function buildGrid(
  client: ServiceApi,
  role: string,
  templates: TemplateRecord[],
  examples: ExampleCandidate[],
): Promise<GridRow[]> {
  const rows: GridRow[] = [];
  for (const example of examples) {
    const [prediction, verbalized] = await Promise.all([
      client.predict(example),
      client.verbalize(example, [role]),
    ]);
    rows.push(buildGridRow(role, example, templates, prediction, verbalized.hypotheses));
  }
  return rows;
}
