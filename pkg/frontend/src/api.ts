// Typed client for the model service. Pure HTTP: no model logic here.

export interface LabelEncoding {
  war: number;
  peace: number;
  threshold: number;
}

export interface ModelInfo {
  feature_names: string[];
  label_encoding: LabelEncoding;
  rule_count: number;
}

export interface EvaluateResponse {
  y: number;
  class: string;
  feature_names: string[];
}

export interface VariableDelta {
  name: string;
  factual: number;
  counterfactual: number;
  direction: 'additive' | 'subtractive' | 'unchanged';
}

export interface TraceSummary {
  best_error_per_restart: number[];
  n_evaluations: number;
  n_accepted: number;
}

export interface CounterfactualResult {
  antecedent: number[];
  achieved_y: number;
  error: number;
  achieved_class: string;
  success: boolean;
  deltas: VariableDelta[];
  no_free_variables: boolean;
  trace: TraceSummary;
  feature_names: string[];
}

export interface CounterfactualRequest {
  factual: number[];
  target: string | number;
  free?: string[];
  anneal?: Record<string, number>;
  success_margin?: number;
}

/** Error carrying the HTTP status and the service's field-level detail. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly field: string | null,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let field: string | null = null;
  let message = `request failed with status ${res.status}`;
  try {
    const body = await res.json();
    if (body && typeof body.detail === 'object' && body.detail !== null) {
      field = body.detail.field ?? null;
      message = body.detail.message ?? message;
    } else if (body && typeof body.detail === 'string') {
      message = body.detail;
    }
  } catch {
    // keep the generic message for non-JSON bodies
  }
  return new ApiError(res.status, field, message);
}

/** What the explorer needs from the service; ApiClient is the HTTP one. */
export interface ModelApi {
  model(): Promise<ModelInfo>;
  evaluate(features: number[]): Promise<EvaluateResponse>;
  counterfactual(req: CounterfactualRequest): Promise<CounterfactualResult>;
}

export class ApiClient implements ModelApi {
  constructor(readonly baseUrl: string) {}

  private async get<T>(path: string): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  model(): Promise<ModelInfo> {
    return this.get<ModelInfo>('/model');
  }

  evaluate(features: number[]): Promise<EvaluateResponse> {
    return this.post<EvaluateResponse>('/evaluate', { features });
  }

  counterfactual(req: CounterfactualRequest): Promise<CounterfactualResult> {
    return this.post<CounterfactualResult>('/counterfactual', req);
  }
}
