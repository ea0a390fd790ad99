// Shapes of the JSON API payloads. Every fact the portal shows comes from
// these; the client adds no data of its own.

export interface PriceJson {
  hardware: string;
  software: string;
}

export interface CatalogRecord {
  name: string;
  address: string;
  provider?: string;
  price?: PriceJson;
  description?: string;
}

export interface BrowseGroup {
  type: string;
  services: CatalogRecord[];
}

export interface BrowseView {
  view: 'all' | 'type' | 'provider';
  types: string[];
  groups: BrowseGroup[];
}

export interface OwnService {
  service_name: string;
  service_type: string;
  provider_name: string;
  host_name: string;
  application_path: string;
  price: PriceJson;
  description: string;
}

export interface RegisteredProvider {
  provider_name: string;
  login_name: string;
  contact_address: string;
  extra_info: string;
}

export interface LoginResult {
  token: string;
  provider_name: string;
}

export interface ApiViolation {
  code: string;
  field: string;
}
