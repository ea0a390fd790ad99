import type { ServicePayload, RegistrationForm } from './api.js';

// Pre-validation mirrors the server's field rules so obviously bad input
// never leaves the page. The server remains the authority; anything it
// rejects anyway is mapped back onto the form per field.

export interface FieldError {
  field: string;
  message: string;
}

// Same shape the server accepts: optional sign, integer part, at most 4
// fractional digits. Negative values are rejected separately so the
// message can say so.
const PRICE_RE = /^-?\d+(\.\d{1,4})?$/;

export function priceProblem(text: string): string | null {
  const value = text.trim();
  if (!value) return 'required';
  if (!PRICE_RE.test(value)) return 'must be a decimal with at most 4 fractional digits';
  if (value.startsWith('-')) return 'must not be negative';
  return null;
}

export interface ServiceDraft {
  service_name: string;
  service_type: string;
  host_name: string;
  application_path: string;
  hardware: string;
  software: string;
  description: string;
}

export const EMPTY_DRAFT: ServiceDraft = {
  service_name: '',
  service_type: '',
  host_name: '',
  application_path: '',
  hardware: '',
  software: '',
  description: '',
};

export function validateServiceDraft(draft: ServiceDraft): FieldError[] {
  const errors: FieldError[] = [];
  for (const field of ['service_name', 'service_type', 'host_name'] as const) {
    if (!draft[field].trim()) errors.push({ field, message: 'required' });
  }
  for (const field of ['hardware', 'software'] as const) {
    const problem = priceProblem(draft[field]);
    if (problem) errors.push({ field, message: problem });
  }
  return errors;
}

export function draftToPayload(draft: ServiceDraft): ServicePayload {
  return {
    service_name: draft.service_name.trim(),
    service_type: draft.service_type.trim(),
    host_name: draft.host_name.trim(),
    application_path: draft.application_path.trim(),
    price: { hardware: draft.hardware.trim(), software: draft.software.trim() },
    description: draft.description.trim(),
  };
}

export function validateRegistration(form: RegistrationForm): FieldError[] {
  const errors: FieldError[] = [];
  const required = ['provider_name', 'login_name', 'password', 'contact_address'] as const;
  for (const field of required) {
    if (!form[field].trim()) errors.push({ field, message: 'required' });
  }
  return errors;
}

/** Map server-reported violations onto form fields. Price violations come
 * back against the component name, which matches the draft fields. */
export function violationErrors(violations: { code: string; field: string }[]): FieldError[] {
  return violations.map((v) => ({
    field: v.field === 'price' ? 'hardware' : v.field,
    message: v.code === 'empty_field' ? 'required' : v.code.replace(/_/g, ' '),
  }));
}
